#pragma once

#include <functional>

#include "exspec/common.hpp"

namespace exspec::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;  // absolute error estimate

  Result& operator+=(const Result& o) {
    value += o.value;
    error += o.error;
    return *this;
  }
};

/// 15-point Gauss-Kronrod rule on [a, b]; error estimated from the embedded
/// 7-point Gauss rule.
Result gauss_kronrod_15(const std::function<double(double)>& f, double a, double b);

struct PanelSettings {
  double max_panel = 0.25;     // upper bound on panel length
  double tolerance = 1e-9;     // absolute error target for the whole interval
  int max_refinements = 12;    // panel-halving rounds before giving up
};

/// Composite GK15 over [a, b] with uniform panels of length <= max_panel.
/// Panels are halved globally until the summed error estimate meets the
/// tolerance. Throws QuadratureFailure when refinement runs out.
Result integrate_panels(const std::function<double(double)>& f, double a, double b,
                        const PanelSettings& settings);

/// Semi-analytic tail integral  Int_R^inf (c / r^alpha) sin(p r) dr  for
/// alpha > 1, p >= 0. Half-period segments are integrated with GK15 and the
/// resulting alternating series is summed with an Euler transform.
Result sin_power_tail(double c, double alpha, double R, double p);

/// Int_R^inf (c / r^alpha) r^2 dr, the p = 0 moment of a power tail;
/// requires alpha > 3.
double power_tail_moment(double c, double alpha, double R);

}  // namespace exspec::quad

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "exspec/common.hpp"

namespace exspec::fit {

struct PolyFit {
  std::vector<double> coeffs;  // aligned with the requested powers
  double rms_residual = 0.0;
  double max_residual = 0.0;
  double condition = 0.0;  // column-scaled normal-equation condition estimate
};

/// Least squares of y ~ sum_k c_k x^powers[k]; columns are scaled to unit
/// norm before solving so mixed powers stay well conditioned.
PolyFit fit_powers(std::span<const double> x, std::span<const double> y,
                   std::span<const double> powers);

/// Least squares slope of y against x (line through data, free intercept).
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

struct RichardsonResult {
  double value = 0.0;
  double error = 0.0;    // |last level - previous level|
  bool diverged = false; // samples grow without bound along the ladder
};

/// Richardson extrapolation of g(t) -> L as t -> infinity assuming an
/// expansion L + a1/t + a2/t^2 + ... sampled at t_j = t0 * ratio^j.
/// `order` levels of elimination are applied (order 2 kills 1/t and 1/t^2).
RichardsonResult richardson_limit(std::span<const double> samples, double ratio, int order);

/// Golden-section extremum refinement on [a, b]; minimizes f (negate for
/// maxima). Returns the abscissa.
double golden_section_min(const std::function<double(double)>& f, double a, double b,
                          double tol);

}  // namespace exspec::fit

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "exspec/common.hpp"
#include "exspec/quadrature.hpp"

namespace exspec {

/// A radially symmetric pair potential V(r) together with the core/tail
/// metadata the quadrature and asymptotics code relies on.
struct RadialPotential {
  std::function<double(double)> profile;        // raw V(r), r > 0
  std::function<double(double)> r_profile;      // r * V(r); optional analytic form
  double core_strength = 0.0;                   // lim_{r->0} r V(r); 0 for regular cores
  double core_cutoff = 0.0;                     // clamp radius for divergent profiles
  double tail_exponent = 4.0;                   // asserted decay V ~ tail_coefficient / r^alpha
  double tail_coefficient = 0.0;                // lim r^alpha V(r); 0 means faster decay
  double tail_start = 10.0;                     // radius beyond which the tail form is trusted
  std::string name = "custom";

  /// V(r) with the core clamp applied.
  double operator()(double r) const {
    if (r < core_cutoff) r = core_cutoff;
    return profile(r);
  }
  /// r * V(r), finite at r = 0 whenever lim r V(r) exists.
  double r_times_v(double r) const {
    if (r < core_cutoff) return r * profile(core_cutoff);
    if (r_profile) return r_profile(r);
    if (r == 0.0) return core_strength;
    return r * profile(r);
  }
};

// Built-in profiles. Tail metadata is filled in so the oscillatory quadrature
// can hand the far region to the semi-analytic sine integral.
RadialPotential make_zero();
RadialPotential make_yukawa(double g, double mu);                       // g e^{-mu r} / r
RadialPotential make_gaussian(double amplitude, double width);          // A e^{-(r/w)^2}
RadialPotential make_lennard_jones(double eps, double sigma,
                                   double core_cutoff = -1.0);          // 4 eps ((s/r)^12 - (s/r)^6)
RadialPotential make_r4_tail(double amplitude, double r0);              // A / (r^4 + r0^4)
RadialPotential make_bump(double amplitude, double radius);             // compactly supported C^inf
RadialPotential make_table(std::vector<double> r, std::vector<double> v,
                           double tail_exponent = 4.0, double tail_coefficient = 0.0);
RadialPotential compose_sum(const RadialPotential& a, const RadialPotential& b);

/// Sampled three-dimensional radial Fourier transform. Evaluation between
/// samples uses a fixed-order local cubic, so the interpolant is deterministic.
class RadialSpectrum {
 public:
  RadialSpectrum() = default;
  RadialSpectrum(std::vector<double> p_grid, std::vector<double> values);

  const std::vector<double>& p_grid() const { return p_grid_; }
  const std::vector<double>& values() const { return values_; }
  double p_max() const { return p_grid_.back(); }
  double at_zero() const { return values_.front(); }

  /// Interpolated Vt(|p|). Direction never enters: the argument is a
  /// magnitude. Throws SpectrumRangeExceeded beyond the grid.
  double value(double p) const;

  std::vector<double> quad_errors;  // per-sample quadrature error estimates

 private:
  std::vector<double> p_grid_;
  std::vector<double> values_;
};

struct TransformSettings {
  double tolerance = 1e-9;   // absolute error target per sample
  double max_panel = 0.0;    // 0 = derive from p_max and tail_start
  double r_max = 0.0;        // 0 = integrate to infinity (semi-analytic tail);
                             // > 0 truncates the radial integral (periodic-box use)
};

/// Forward transform on a momentum grid that must start at p = 0:
///   Vt(p) = (4 pi / p) Int_0^inf V(r) r sin(p r) dr,  Vt(0) = 4 pi Int V r^2 dr.
/// The region beyond tail_start is integrated semi-analytically from the tail
/// metadata.
RadialSpectrum fourier_transform(const RadialPotential& pot, std::span<const double> p_grid,
                                 const TransformSettings& settings = {});

/// Single-momentum version of the above.
double fourier_transform_at(const RadialPotential& pot, double p,
                            const TransformSettings& settings = {});

/// Inverse transform V(r) = (1 / (2 pi^2 r)) Int_0^pmax Vt(x) x sin(x r) dx.
/// Requires the spectrum to have decayed at its cutoff.
std::vector<double> inverse_transform(const RadialSpectrum& spec, std::span<const double> r_grid,
                                      const TransformSettings& settings = {});

struct TailLimit {
  double value = 0.0;
  double error = 0.0;
  bool exact_zero = false;       // compactly supported profile
  double decay_exponent = 0.0;   // asserted exponent when the limit vanishes by decay, else 0
};

/// lim_{r->inf} r^4 V(r) by an order-2 Richardson ladder at tail_start * 2^j.
/// Throws DivergentTail when the ladder grows without bound.
TailLimit tail_limit_r4(const RadialPotential& pot);

struct SlopeFit {
  double slope = 0.0;
  double rms_residual = 0.0;
  double max_residual = 0.0;
  int points_used = 0;
};

struct SlopeSettings {
  int max_points = 12;
  double residual_band = 0.0;  // 0 = auto: 1e-6 * (|Vt(0)| + max|dVt|)
};

/// One-sided fit of Vt(p) - Vt(0) ~ c1 p + c2 p^2 + c3 p^3 on the smallest
/// positive momenta; returns c1.
SlopeFit spectrum_slope_at_zero(const RadialSpectrum& spec, const SlopeSettings& settings = {});

struct TheoremReport {
  bool hypothesis_met = false;       // lim r V(r) != 0
  double core_strength = 0.0;
  double lim_p2_vtilde = 0.0;        // estimated lim p^2 Vt(p)
  double lim_p2_error = 0.0;
  double lim_r4_v = 0.0;             // estimated lim r^4 V(r)
  double lim_r4_error = 0.0;
  double slope_at_zero = 0.0;        // Vt'(0+)
  double slope_residual = 0.0;
  double kappa = 0.0;                // convention constant used for the prediction
  double predicted_slope = 0.0;      // -kappa * lim r^4 V
  double proportionality_ratio = 0.0;
  double sound_coefficient = 0.0;    // c = -kappa * lim r^4 V
  bool sign_check = false;           // c > 0 (attractive tail)
  bool proportionality_pass = false;
  double tolerance = 0.0;
};

struct TheoremSettings {
  double tolerance = 0.02;         // relative band on the slope/tail proportionality
  double zero_slope_band = 1e-4;   // |slope| <= band * |Vt(0)| counts as zero
  double quad_tolerance = 1e-9;
};

/// Checks the tail-asymptotics theorem on one potential: estimates
/// lim p^2 Vt, lim r^4 V, Vt'(0+) and the predicted proportionality between
/// the latter two. Failures are encoded in the report, never thrown.
TheoremReport verify_general_position(const RadialPotential& pot,
                                      const TheoremSettings& settings = {});

struct NonanalyticFit {
  bool detected = false;   // false: spectrum looks even-analytic
  double beta = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double amplitude = 0.0;  // coefficient of the p^beta term
  double rss_ratio = 0.0;  // best RSS / even-analytic RSS
};

/// Fits the exponent beta of the leading nonanalytic term
/// |Vt(p) - Vt(0) - even part| ~ p^beta near p = 0 (1 for r^-4 tails,
/// 3 for r^-6 tails). The even-analytic part (p^2, p^4) is fit jointly.
NonanalyticFit nonanalytic_exponent(const RadialSpectrum& spec);

// Momentum-grid helpers.
std::vector<double> uniform_grid(double lo, double hi, int count);
std::vector<double> geometric_grid_with_zero(double lo, double hi, int count);

}  // namespace exspec

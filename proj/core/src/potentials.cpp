#include "exspec/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "exspec/conventions.hpp"
#include "exspec/errors.hpp"
#include "exspec/fitting.hpp"

namespace exspec {

namespace {

// Local cubic (4-point Lagrange) on a sorted grid, window shifted at the ends.
double local_cubic(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  const auto n = std::ssize(xs);
  if (n == 1) return ys[0];
  if (n < 4) {
    // fall back to linear between the bracketing nodes
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t hi = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - xs.begin(), 1), n - 1);
    const double t = (x - xs[hi - 1]) / (xs[hi] - xs[hi - 1]);
    return ys[hi - 1] * (1 - t) + ys[hi] * t;
  }
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::ptrdiff_t i = std::clamp<std::ptrdiff_t>((it - xs.begin()) - 2, 0, n - 4);
  double out = 0.0;
  for (std::ptrdiff_t a = i; a < i + 4; ++a) {
    double w = 1.0;
    for (std::ptrdiff_t b = i; b < i + 4; ++b) {
      if (a != b) w *= (x - xs[b]) / (xs[a] - xs[b]);
    }
    out += w * ys[a];
  }
  return out;
}

void check_core_integrable(const RadialPotential& pot) {
  if (pot.core_cutoff > 0.0) return;  // clamped profiles are bounded at the origin
  double prev = std::abs(pot.r_times_v(1e-2) * 1e-2);
  int growing = 0;
  double first = 0.0, last = 0.0;
  for (int i = 1; i <= 8; ++i) {
    const double r = std::pow(10.0, -2.0 - 0.5 * i);
    const double g = std::abs(pot.r_times_v(r) * r);  // r^2 V(r)
    if (i == 1) first = g;
    last = g;
    if (g > prev * 1.5) ++growing;
    prev = g;
  }
  if (growing >= 6 && last > 50.0 * std::max(first, 1e-300)) {
    throw NonIntegrableCore("potential diverges faster than 1/r^2 at the origin");
  }
}

void check_tail_integrable(const RadialPotential& pot) {
  if (pot.tail_coefficient != 0.0 && pot.tail_exponent <= 3.0) {
    throw NonIntegrableTail("tail exponent " + std::to_string(pot.tail_exponent) +
                            " <= 3 with nonzero tail coefficient");
  }
}

double derive_panel(const RadialPotential& pot, double p_max, const TransformSettings& s) {
  double panel = s.max_panel > 0.0 ? s.max_panel : std::min(0.25, pot.tail_start / 16.0);
  if (p_max > 0.0) panel = std::min(panel, pi / (4.0 * p_max));
  return panel;
}

// Raw radial integral for one momentum: Int_0^R_num r V(r) sin(pr) dr plus the
// semi-analytic tail, already scaled to Vt(p).
double transform_sample(const RadialPotential& pot, double p, double panel,
                        const TransformSettings& s, double* err_out) {
  const double r_inf = s.r_max > 0.0 ? s.r_max : std::numeric_limits<double>::infinity();
  const double r_num = std::min(pot.tail_start, r_inf);

  quad::PanelSettings ps;
  ps.max_panel = panel;
  ps.tolerance = std::max(s.tolerance * (p > 0.0 ? p / (4.0 * pi) : 1.0 / (4.0 * pi)), 1e-16);

  quad::Result raw;
  if (p == 0.0) {
    raw = quad::integrate_panels([&](double r) { return pot.r_times_v(r) * r; }, 0.0, r_num, ps);
    double tail = 0.0;
    if (r_num < r_inf) {
      tail = quad::power_tail_moment(pot.tail_coefficient, pot.tail_exponent, r_num);
      if (std::isfinite(r_inf)) {
        tail -= quad::power_tail_moment(pot.tail_coefficient, pot.tail_exponent, r_inf);
      }
    }
    if (err_out) *err_out = 4.0 * pi * raw.error;
    return 4.0 * pi * (raw.value + tail);
  }

  raw = quad::integrate_panels([&, p](double r) { return pot.r_times_v(r) * std::sin(p * r); },
                               0.0, r_num, ps);
  quad::Result tail;
  if (r_num < r_inf && pot.tail_coefficient != 0.0) {
    tail = quad::sin_power_tail(pot.tail_coefficient, pot.tail_exponent - 1.0, r_num, p);
    if (std::isfinite(r_inf)) {
      quad::Result beyond =
          quad::sin_power_tail(pot.tail_coefficient, pot.tail_exponent - 1.0, r_inf, p);
      tail.value -= beyond.value;
      tail.error += beyond.error;
    }
  }
  if (err_out) *err_out = 4.0 * pi / p * (raw.error + tail.error);
  return 4.0 * pi / p * (raw.value + tail.value);
}

}  // namespace

RadialPotential make_zero() {
  RadialPotential pot;
  pot.profile = [](double) { return 0.0; };
  pot.r_profile = [](double) { return 0.0; };
  pot.tail_coefficient = 0.0;
  pot.tail_start = 1.0;
  pot.name = "zero";
  return pot;
}

RadialPotential make_yukawa(double g, double mu) {
  RadialPotential pot;
  pot.profile = [g, mu](double r) { return g * std::exp(-mu * r) / r; };
  pot.r_profile = [g, mu](double r) { return g * std::exp(-mu * r); };
  pot.core_strength = g;
  pot.tail_coefficient = 0.0;  // exponential screening beats any power
  pot.tail_start = 50.0 / mu;
  pot.name = "yukawa";
  return pot;
}

RadialPotential make_gaussian(double amplitude, double width) {
  RadialPotential pot;
  pot.profile = [amplitude, width](double r) { return amplitude * std::exp(-(r / width) * (r / width)); };
  pot.tail_coefficient = 0.0;
  pot.tail_start = 9.0 * width;
  pot.name = "gaussian";
  return pot;
}

RadialPotential make_lennard_jones(double eps, double sigma, double core_cutoff) {
  RadialPotential pot;
  pot.profile = [eps, sigma](double r) {
    const double s6 = std::pow(sigma / r, 6.0);
    return 4.0 * eps * (s6 * s6 - s6);
  };
  pot.core_cutoff = core_cutoff >= 0.0 ? core_cutoff : 0.5 * sigma;
  pot.tail_exponent = 6.0;
  pot.tail_coefficient = -4.0 * eps * std::pow(sigma, 6.0);
  pot.tail_start = 40.0 * sigma;
  pot.name = "lennard-jones";
  return pot;
}

RadialPotential make_r4_tail(double amplitude, double r0) {
  RadialPotential pot;
  const double r04 = std::pow(r0, 4.0);
  pot.profile = [amplitude, r04](double r) { return amplitude / (std::pow(r, 4.0) + r04); };
  pot.tail_exponent = 4.0;
  pot.tail_coefficient = amplitude;
  pot.tail_start = std::max(100.0, 40.0 * r0);
  pot.name = "r4tail";
  return pot;
}

RadialPotential make_bump(double amplitude, double radius) {
  RadialPotential pot;
  pot.profile = [amplitude, radius](double r) {
    const double x = (r / radius) * (r / radius);
    if (x >= 1.0) return 0.0;
    return amplitude * std::exp(-x / (1.0 - x));
  };
  pot.tail_coefficient = 0.0;
  pot.tail_start = radius;
  pot.name = "bump";
  return pot;
}

RadialPotential make_table(std::vector<double> r, std::vector<double> v, double tail_exponent,
                           double tail_coefficient) {
  if (r.size() != v.size() || r.size() < 2) {
    throw InvalidInput("table potential: need matching r/V columns with >= 2 rows");
  }
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (!(r[i] > r[i - 1])) throw InvalidInput("table potential: r must be strictly increasing");
  }
  RadialPotential pot;
  const double r_last = r.back();
  auto rs = std::make_shared<std::vector<double>>(std::move(r));
  auto vs = std::make_shared<std::vector<double>>(std::move(v));
  pot.profile = [rs, vs, r_last, tail_exponent, tail_coefficient](double x) {
    if (x <= rs->front()) return vs->front();
    if (x >= r_last) {
      return tail_coefficient != 0.0 ? tail_coefficient / std::pow(x, tail_exponent) : 0.0;
    }
    return local_cubic(*rs, *vs, x);
  };
  pot.tail_exponent = tail_exponent;
  pot.tail_coefficient = tail_coefficient;
  pot.tail_start = r_last;
  pot.name = "table";
  return pot;
}

RadialPotential compose_sum(const RadialPotential& a, const RadialPotential& b) {
  RadialPotential pot;
  pot.profile = [a, b](double r) { return a(r) + b(r); };
  pot.r_profile = [a, b](double r) { return a.r_times_v(r) + b.r_times_v(r); };
  pot.core_strength = a.core_strength + b.core_strength;
  pot.core_cutoff = 0.0;  // addends clamp themselves
  if (a.tail_coefficient == 0.0 && b.tail_coefficient == 0.0) {
    pot.tail_coefficient = 0.0;
    pot.tail_exponent = std::min(a.tail_exponent, b.tail_exponent);
  } else if (a.tail_coefficient == 0.0) {
    pot.tail_exponent = b.tail_exponent;
    pot.tail_coefficient = b.tail_coefficient;
  } else if (b.tail_coefficient == 0.0) {
    pot.tail_exponent = a.tail_exponent;
    pot.tail_coefficient = a.tail_coefficient;
  } else if (a.tail_exponent < b.tail_exponent) {
    pot.tail_exponent = a.tail_exponent;
    pot.tail_coefficient = a.tail_coefficient;
  } else if (b.tail_exponent < a.tail_exponent) {
    pot.tail_exponent = b.tail_exponent;
    pot.tail_coefficient = b.tail_coefficient;
  } else {
    pot.tail_exponent = a.tail_exponent;
    pot.tail_coefficient = a.tail_coefficient + b.tail_coefficient;
  }
  pot.tail_start = std::max(a.tail_start, b.tail_start);
  pot.name = a.name + "+" + b.name;
  return pot;
}

RadialSpectrum::RadialSpectrum(std::vector<double> p_grid, std::vector<double> values)
    : p_grid_(std::move(p_grid)), values_(std::move(values)) {
  if (p_grid_.size() != values_.size() || p_grid_.empty()) {
    throw InvalidInput("RadialSpectrum: grid/value size mismatch");
  }
  if (p_grid_.front() != 0.0) {
    throw InvalidInput("RadialSpectrum: momentum grid must start at p = 0");
  }
  for (std::size_t i = 1; i < p_grid_.size(); ++i) {
    if (!(p_grid_[i] > p_grid_[i - 1])) {
      throw InvalidInput("RadialSpectrum: momentum grid must be strictly increasing");
    }
  }
}

double RadialSpectrum::value(double p) const {
  p = std::abs(p);
  if (p > p_grid_.back() * (1.0 + 1e-12)) {
    throw SpectrumRangeExceeded("spectrum evaluated at p = " + std::to_string(p) +
                                " beyond grid end " + std::to_string(p_grid_.back()));
  }
  p = std::min(p, p_grid_.back());
  return local_cubic(p_grid_, values_, p);
}

RadialSpectrum fourier_transform(const RadialPotential& pot, std::span<const double> p_grid,
                                 const TransformSettings& settings) {
  if (p_grid.empty() || p_grid.front() != 0.0) {
    throw InvalidInput("fourier_transform: momentum grid must start at p = 0");
  }
  check_tail_integrable(pot);
  check_core_integrable(pot);

  const double p_max = p_grid.back();
  const double panel = derive_panel(pot, p_max, settings);

  std::vector<double> values(p_grid.size());
  std::vector<double> errors(p_grid.size());
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    values[i] = transform_sample(pot, p_grid[i], panel, settings, &errors[i]);
  }
  RadialSpectrum spec(std::vector<double>(p_grid.begin(), p_grid.end()), std::move(values));
  spec.quad_errors = std::move(errors);
  return spec;
}

double fourier_transform_at(const RadialPotential& pot, double p,
                            const TransformSettings& settings) {
  check_tail_integrable(pot);
  p = std::abs(p);
  const double panel = derive_panel(pot, p, settings);
  return transform_sample(pot, p, panel, settings, nullptr);
}

std::vector<double> inverse_transform(const RadialSpectrum& spec, std::span<const double> r_grid,
                                      const TransformSettings& settings) {
  const double tol = settings.tolerance > 0 ? settings.tolerance : 1e-9;
  const double scale = std::max(std::abs(spec.at_zero()), 1e-30);
  if (std::abs(spec.values().back()) > 1e-4 * scale) {
    throw InsufficientSpectrum("inverse_transform: |Vt| at the grid cutoff is " +
                               std::to_string(std::abs(spec.values().back())) +
                               ", spectrum not decayed");
  }
  double r_max = 0.0;
  for (double r : r_grid) r_max = std::max(r_max, r);

  quad::PanelSettings ps;
  ps.max_panel = r_max > 0.0 ? std::min(0.25 * spec.p_max(), pi / (4.0 * r_max))
                             : 0.25 * spec.p_max();
  ps.tolerance = tol;

  std::vector<double> out(r_grid.size());
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    const double r = r_grid[i];
    if (r == 0.0) {
      auto res = quad::integrate_panels(
          [&](double x) { return spec.value(x) * x * x; }, 0.0, spec.p_max(), ps);
      out[i] = res.value / (2.0 * pi * pi);
    } else {
      auto res = quad::integrate_panels(
          [&](double x) { return spec.value(x) * x * std::sin(x * r); }, 0.0, spec.p_max(), ps);
      out[i] = res.value / (2.0 * pi * pi * r);
    }
  }
  return out;
}

TailLimit tail_limit_r4(const RadialPotential& pot) {
  constexpr int levels = 11;
  std::vector<double> g(levels);
  bool all_zero = true;
  for (int j = 0; j < levels; ++j) {
    const double r = pot.tail_start * std::pow(2.0, double(j));
    g[j] = std::pow(r, 4.0) * pot(r);
    if (g[j] != 0.0) all_zero = false;
  }
  TailLimit out;
  if (all_zero) {
    out.exact_zero = true;
    return out;
  }
  auto rich = fit::richardson_limit(g, 2.0, 2);
  if (rich.diverged) {
    throw DivergentTail("r^4 V(r) grows without bound along the sampling ladder");
  }
  out.value = rich.value;
  out.error = rich.error;
  if (pot.tail_coefficient != 0.0 && pot.tail_exponent > 4.0 &&
      std::abs(out.value) < 1e-8 * std::abs(pot.tail_coefficient) + 1e-12) {
    out.value = 0.0;
    out.decay_exponent = pot.tail_exponent;
  }
  return out;
}

SlopeFit spectrum_slope_at_zero(const RadialSpectrum& spec, const SlopeSettings& settings) {
  std::vector<double> xs, ys;
  for (std::size_t i = 1; i < spec.p_grid().size() && std::ssize(xs) < settings.max_points; ++i) {
    xs.push_back(spec.p_grid()[i]);
    ys.push_back(spec.values()[i] - spec.at_zero());
  }
  if (xs.size() < 5) {
    throw IllConditionedFit("spectrum_slope_at_zero: need >= 5 positive momenta near zero");
  }
  const double powers[] = {1.0, 2.0, 3.0};
  auto fit = fit::fit_powers(xs, ys, powers);

  double y_scale = std::abs(spec.at_zero());
  for (double y : ys) y_scale = std::max(y_scale, std::abs(y));
  const double band =
      settings.residual_band > 0.0 ? settings.residual_band : 1e-6 * (y_scale + 1e-30);
  if (fit.rms_residual > band) {
    throw IllConditionedFit("spectrum_slope_at_zero: rms residual " +
                            std::to_string(fit.rms_residual) + " above band " +
                            std::to_string(band));
  }
  SlopeFit out;
  out.slope = fit.coeffs[0];
  out.rms_residual = fit.rms_residual;
  out.max_residual = fit.max_residual;
  out.points_used = int(xs.size());
  return out;
}

TheoremReport verify_general_position(const RadialPotential& pot,
                                      const TheoremSettings& settings) {
  TheoremReport rep;
  rep.kappa = conventions::kappa;
  rep.tolerance = settings.tolerance;
  rep.core_strength = pot.core_strength;
  rep.hypothesis_met = pot.core_strength != 0.0;

  TransformSettings ts;
  ts.tolerance = settings.quad_tolerance;

  // Small-momentum spectrum for the slope.
  auto small_grid = geometric_grid_with_zero(2e-3, 6e-2, 18);
  auto small_spec = fourier_transform(pot, small_grid, ts);
  auto slope = spectrum_slope_at_zero(small_spec, {.max_points = 18, .residual_band = 1e-3});
  rep.slope_at_zero = slope.slope;
  rep.slope_residual = slope.rms_residual;

  // Large-momentum ladder for lim p^2 Vt(p).
  std::vector<double> g;
  for (double p : {10.0, 20.0, 40.0, 80.0}) {
    g.push_back(p * p * fourier_transform_at(pot, p, ts));
  }
  auto rich = fit::richardson_limit(g, 4.0, 2);  // expansion in 1/p^2, ladder ratio 4
  rep.lim_p2_vtilde = rich.value;
  rep.lim_p2_error = rich.error;

  auto tail = tail_limit_r4(pot);
  rep.lim_r4_v = tail.value;
  rep.lim_r4_error = tail.error;

  rep.predicted_slope = -conventions::kappa * rep.lim_r4_v;
  rep.sound_coefficient = conventions::sound_coefficient(rep.lim_r4_v);
  rep.sign_check = rep.sound_coefficient > 0.0;

  const double vt0 = std::abs(small_spec.at_zero());
  if (rep.lim_r4_v != 0.0) {
    rep.proportionality_ratio = rep.slope_at_zero / rep.predicted_slope;
    rep.proportionality_pass = std::abs(rep.proportionality_ratio - 1.0) <= settings.tolerance;
  } else {
    rep.proportionality_ratio = 0.0;
    rep.proportionality_pass = std::abs(rep.slope_at_zero) <= settings.zero_slope_band * vt0;
  }
  return rep;
}

NonanalyticFit nonanalytic_exponent(const RadialSpectrum& spec) {
  std::vector<double> xs, ys;
  for (std::size_t i = 1; i < spec.p_grid().size(); ++i) {
    xs.push_back(spec.p_grid()[i]);
    ys.push_back(spec.values()[i] - spec.at_zero());
  }
  if (xs.size() < 8) throw IllConditionedFit("nonanalytic_exponent: spectrum too sparse");

  const double even_powers[] = {2.0, 4.0};
  auto even_fit = fit::fit_powers(xs, ys, even_powers);
  const double rss_even = even_fit.rms_residual;

  auto rss_at = [&](double beta) {
    const double powers[] = {beta, 2.0, 4.0};
    return fit::fit_powers(xs, ys, powers).rms_residual;
  };

  // Exponent scan; windows around the even powers are skipped where the basis
  // degenerates.
  double best_beta = 0.0, best_rss = std::numeric_limits<double>::infinity();
  for (double beta = 0.4; beta <= 3.6 + 1e-9; beta += 0.05) {
    if (std::abs(beta - 2.0) < 0.12 || std::abs(beta - 4.0) < 0.12) continue;
    const double rss = rss_at(beta);
    if (rss < best_rss) {
      best_rss = rss;
      best_beta = beta;
    }
  }
  // Golden refinement inside the winning bracket (kept clear of beta = 2, 4).
  double lo = best_beta - 0.05, hi = best_beta + 0.05;
  if (!(lo < 1.88 && hi > 1.88) && !(lo < 2.12 && hi > 2.12)) {
    best_beta = fit::golden_section_min(rss_at, lo, hi, 1e-4);
    best_rss = rss_at(best_beta);
  }

  NonanalyticFit out;
  out.beta = best_beta;
  out.rss_ratio = rss_even > 0 ? best_rss / rss_even : 1.0;
  const double powers[] = {best_beta, 2.0, 4.0};
  auto full = fit::fit_powers(xs, ys, powers);
  out.amplitude = full.coeffs[0];

  // A real nonanalytic term must explain a dominant share of the even-model
  // residual and its amplitude must beat the fit noise.
  out.detected = out.rss_ratio < 0.25 && std::abs(out.amplitude) > 10.0 * full.rms_residual;
  if (!out.detected) return out;

  // Confidence interval: where the RSS doubles.
  double ci_lo = best_beta, ci_hi = best_beta;
  for (double beta = best_beta; beta >= 0.4; beta -= 0.01) {
    if (std::abs(beta - 2.0) < 0.12) continue;
    if (rss_at(beta) > 2.0 * best_rss) break;
    ci_lo = beta;
  }
  for (double beta = best_beta; beta <= 3.6; beta += 0.01) {
    if (std::abs(beta - 2.0) < 0.12) continue;
    if (rss_at(beta) > 2.0 * best_rss) break;
    ci_hi = beta;
  }
  out.ci_low = ci_lo;
  out.ci_high = ci_hi;
  return out;
}

std::vector<double> uniform_grid(double lo, double hi, int count) {
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i) g[i] = lo + (hi - lo) * double(i) / double(count - 1);
  return g;
}

std::vector<double> geometric_grid_with_zero(double lo, double hi, int count) {
  std::vector<double> g;
  g.reserve(count + 1);
  g.push_back(0.0);
  const double ratio = std::pow(hi / lo, 1.0 / double(count - 1));
  double p = lo;
  for (int i = 0; i < count; ++i) {
    g.push_back(p);
    p *= ratio;
  }
  g.back() = hi;
  return g;
}

}  // namespace exspec

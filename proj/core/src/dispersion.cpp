#include "exspec/dispersion.hpp"

#include <algorithm>
#include <cmath>

#include "exspec/conventions.hpp"
#include "exspec/errors.hpp"
#include "exspec/fitting.hpp"

namespace exspec {

EpsilonValue epsilon_bose(double p, const RadialSpectrum& spec, const Units& units) {
  EpsilonValue out;
  const double vt = spec.value(p);
  const double kin = units.kinetic_half() * p * p;
  const double radicand = (kin + vt) * (kin + vt) - vt * vt;
  if (radicand < 0.0) {
    out.unstable = true;
    out.magnitude = std::sqrt(-radicand);
    out.value = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.value = std::sqrt(radicand);
  out.magnitude = out.value;
  return out;
}

double epsilon_fermi(double p, const RadialSpectrum& spec, const Units& units) {
  if (p == 0.0) return 0.0;
  const double kin = units.kinetic_half() * p * p;
  return std::abs(kin + spec.value(p) - spec.at_zero());
}

LambdaValue lambda_full(const Vec3& p, const Vec3& v, Statistics stats,
                        const RadialSpectrum& spec, const Units& units) {
  LambdaValue out;
  const double drift = -units.hbar * units.hbar * p.dot(v);
  if (stats == Statistics::fermi) {
    out.value = drift + epsilon_fermi(p.norm(), spec, units);
    return out;
  }
  const auto eps = epsilon_bose(p.norm(), spec, units);
  out.unstable = eps.unstable;
  out.value = drift + (eps.unstable ? eps.magnitude : eps.value);
  return out;
}

DispersionCurve sample_curve(Statistics stats, const RadialSpectrum& spec,
                             std::span<const double> p_grid, const Vec3& v,
                             const Vec3& direction, const Units& units) {
  DispersionCurve curve;
  curve.statistics = stats;
  curve.units = units;
  curve.v = v;
  const double dn = direction.norm();
  curve.direction = dn > 0 ? direction * (1.0 / dn) : Vec3{1, 0, 0};
  const double v_parallel = curve.direction.dot(v);

  curve.p_grid.assign(p_grid.begin(), p_grid.end());
  curve.epsilon.resize(p_grid.size());
  curve.lambda.resize(p_grid.size());
  curve.unstable.resize(p_grid.size(), false);
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    const double p = p_grid[i];
    double eps;
    if (stats == Statistics::fermi) {
      eps = epsilon_fermi(p, spec, units);
    } else {
      const auto e = epsilon_bose(p, spec, units);
      curve.unstable[i] = e.unstable;
      eps = e.unstable ? e.magnitude : e.value;
    }
    curve.epsilon[i] = eps;
    curve.lambda[i] = -units.hbar * units.hbar * p * v_parallel + eps;
  }
  return curve;
}

namespace {

double eps_continuous(Statistics stats, const RadialSpectrum& spec, const Units& units,
                      double p) {
  if (stats == Statistics::fermi) return epsilon_fermi(p, spec, units);
  const auto e = epsilon_bose(p, spec, units);
  return e.unstable ? e.magnitude : e.value;
}

}  // namespace

LandauFeatures landau_features(const DispersionCurve& curve, const RadialSpectrum& spec,
                               const RadialPotential& pot, const FeatureSettings& settings) {
  LandauFeatures out;
  out.kappa = conventions::kappa;
  const Units& units = curve.units;
  const Statistics stats = curve.statistics;
  const auto eps_at = [&](double p) { return eps_continuous(stats, spec, units, p); };

  // sound slope: Richardson ladder on eps(p)/p at halving momenta
  {
    double p0 = curve.p_grid.size() > 1 ? curve.p_grid[1] : 1e-3;
    p0 = std::min(p0, 0.02 * curve.p_grid.back());
    // halving p reads as a geometric ladder in t = 1/p with expansion
    // eps/p = c + c1/t + c2/t^2 + ...
    std::vector<double> s;
    for (int j = 0; j < settings.sound_levels + 2; ++j) {
      const double p = p0 / std::pow(2.0, double(j));
      s.push_back(eps_at(p) / p);
    }
    out.sound_slope = fit::richardson_limit(s, 2.0, 2).value;
  }

  // interior critical points from centred-difference sign changes
  const auto& ps = curve.p_grid;
  const auto& es = curve.epsilon;
  for (std::size_t i = 1; i + 1 < ps.size(); ++i) {
    const double d_prev = es[i] - es[i - 1];
    const double d_next = es[i + 1] - es[i];
    if (d_prev == 0.0 && d_next == 0.0) {
      out.degenerate = true;
      continue;
    }
    const bool is_max = d_prev > 0.0 && d_next < 0.0;
    const bool is_min = d_prev < 0.0 && d_next > 0.0;
    if (!is_max && !is_min) continue;
    const double a = ps[i - 1], b = ps[i + 1];
    double p_star;
    if (is_max) {
      p_star = fit::golden_section_min([&](double p) { return -eps_at(p); }, a, b,
                                       settings.golden_tol);
    } else {
      p_star = fit::golden_section_min(eps_at, a, b, settings.golden_tol);
    }
    const CurvePoint pt{p_star, eps_at(p_star)};
    if (is_max) {
      ++out.n_maxima;
      if (!out.maxon) out.maxon = pt;
    } else {
      ++out.n_minima;
      if (!out.roton && out.maxon) out.roton = pt;
    }
  }

  out.critical_velocity =
      critical_velocity_continuum(spec, 0.0, curve.p_grid.back(), 512, units);

  if (pot.tail_exponent == 4.0 && pot.tail_coefficient != 0.0) {
    const auto pred = sound_slope_prediction(pot);
    out.predicted_slope = pred.coefficient;
    out.has_prediction = true;
    out.slope_ratio = pred.coefficient != 0.0 ? out.sound_slope / pred.coefficient : 0.0;
  }
  return out;
}

double critical_velocity_lattice(const CoefficientField& field, int n_max, const Units& units) {
  if (n_max < 1) throw EmptyLattice("critical_velocity_lattice: empty candidate set");
  const TorusGeometry& geom = field.geometry();
  const double v0 = field.at_vector({0, 0, 0});
  const_cast<CoefficientField&>(field).ensure_range(
      geom.lattice_vector(n_max, n_max, n_max).norm());
  double best = std::numeric_limits<double>::infinity();
  for (int i = -n_max; i <= n_max; ++i) {
    for (int j = -n_max; j <= n_max; ++j) {
      for (int k = -n_max; k <= n_max; ++k) {
        if (i == 0 && j == 0 && k == 0) continue;
        const Vec3 l = geom.lattice_vector(i, j, k);
        const double mag = l.norm();
        const double vl = field.at_vector(l);
        const double cand =
            std::abs((vl - v0) / mag + units.kinetic_half() * mag);
        best = std::min(best, cand);
      }
    }
  }
  return best * units.mass / (units.hbar * units.hbar);
}

double critical_velocity_continuum(const RadialSpectrum& spec, double p_lo, double p_hi,
                                   int grid_points, const Units& units) {
  if (grid_points < 3) throw EmptyLattice("critical_velocity_continuum: grid too small");
  const double vt0 = spec.at_zero();
  const auto objective = [&](double p) {
    return std::abs((spec.value(p) - vt0) / p + units.kinetic_half() * p);
  };
  if (p_lo <= 0.0) p_lo = p_hi / grid_points;
  double best = std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i < grid_points; ++i) {
    const double p = p_lo + (p_hi - p_lo) * double(i) / double(grid_points - 1);
    const double f = objective(p);
    if (f < best) {
      best = f;
      best_i = i;
    }
  }
  const double h = (p_hi - p_lo) / double(grid_points - 1);
  const double a = std::max(p_lo, p_lo + (best_i - 1) * h);
  const double b = std::min(p_hi, p_lo + (best_i + 1) * h);
  const double refined = fit::golden_section_min(objective, a, b, 1e-10 * (p_hi - p_lo));
  best = std::min(best, objective(refined));
  return best * units.mass / (units.hbar * units.hbar);
}

SoundPrediction sound_slope_prediction(const RadialPotential& pot) {
  if (pot.tail_exponent != 4.0 || pot.tail_coefficient == 0.0) {
    throw WrongTailExponent("sound_slope_prediction: potential has no r^-4 tail");
  }
  SoundPrediction out;
  out.tail_limit = tail_limit_r4(pot).value;
  out.coefficient = conventions::sound_coefficient(out.tail_limit);
  out.sign_ok = out.coefficient > 0.0;
  return out;
}

}  // namespace exspec

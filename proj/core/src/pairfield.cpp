#include "exspec/pairfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "exspec/errors.hpp"
#include "exspec/fitting.hpp"

namespace exspec {

namespace {

constexpr Complex kImag{0.0, 1.0};

// Deterministic unit directions for sampled shells: Fibonacci sphere plus the
// axes.
std::vector<Vec3> shell_directions() {
  std::vector<Vec3> dirs;
  dirs.reserve(262);
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  for (int i = 0; i < 256; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / 256.0;
    const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = 2.0 * pi * std::fmod(i / golden, 1.0);
    dirs.push_back({rxy * std::cos(phi), rxy * std::sin(phi), z});
  }
  dirs.push_back({1, 0, 0});
  dirs.push_back({-1, 0, 0});
  dirs.push_back({0, 1, 0});
  dirs.push_back({0, -1, 0});
  dirs.push_back({0, 0, 1});
  dirs.push_back({0, 0, -1});
  return dirs;
}

std::size_t pack_cube(const Vec3i& n, int radius) {
  const std::size_t side = 2 * std::size_t(radius) + 1;
  return (std::size_t(n.x + radius) * side + std::size_t(n.y + radius)) * side +
         std::size_t(n.z + radius);
}

}  // namespace

std::optional<double> b_coefficient(Statistics stats, const CoefficientField& field,
                                    const Vec3& k2, const Vec3& l, const Units& units) {
  const double v0 = field.at_vector({0, 0, 0});
  const double v2k2 = field.at_vector(k2 * 2.0);
  const double vm = field.at_vector(l - k2);
  const double vp = field.at_vector(l + k2);
  const double kin = units.kinetic_full() * (l.norm2() - k2.norm2());
  double num, den;
  if (stats == Statistics::bose) {
    num = kin - (v0 + v2k2);
    den = vm + vp;
  } else {
    num = kin + (v0 - v2k2);
    den = vm - vp;
  }
  if (den == 0.0) return std::nullopt;
  return num / den;
}

PairEntry phi_coefficient(Statistics stats, double b, bool l2_greater, double denom_sign) {
  PairEntry e;
  e.b = b;
  if (stats == Statistics::bose) {
    const double disc = b * b - 1.0;
    if (disc >= 0.0) {
      const double root = std::sqrt(disc);
      e.phi = Complex(-0.5 * b + (l2_greater ? 0.5 : -0.5) * root, 0.0);
    } else {
      e.phi = Complex(-0.5 * b, (l2_greater ? 0.5 : -0.5) * std::sqrt(-disc));
      e.complex_flag = true;
    }
  } else {
    const double disc = 1.0 - b * b;
    if (disc >= 0.0) {
      e.phi = Complex(0.5 * denom_sign * std::sqrt(disc), -0.5 * b);
    } else {
      // decaying imaginary root, expected at large |l|
      const double sgn = b >= 0.0 ? 1.0 : -1.0;
      e.phi = Complex(0.0, -0.5 * (b - sgn * std::sqrt(-disc)));
    }
  }
  return e;
}

PairEntry PairFieldSolution::compute_entry(const Vec3i& n) const {
  PairEntry e;
  if (n == k2n_) {
    if (stats_ == Statistics::bose) {
      e.phi = Complex(0.5, 0.0);
      e.b = -1.0;
    } else {
      e.phi = Complex(0.0, -0.5);
      e.b = 1.0;
    }
    return e;
  }
  if (n == -k2n_) {
    if (stats_ == Statistics::bose) {
      e.phi = Complex(0.5, 0.0);
      e.b = -1.0;
    } else {
      e.phi = Complex(0.0, 0.5);
      e.b = -1.0;
    }
    return e;
  }
  const Vec3 l = geometry().lattice_vector(n);
  const Vec3 k2 = this->k2();
  auto b = b_coefficient(stats_, field_, k2, l, units_);
  if (!b) {
    e.degenerate = true;
    e.b = std::numeric_limits<double>::quiet_NaN();
    return e;  // free-solution branch: phi = 0 away from +-k2
  }
  const bool l2_greater = l.norm2() > k2.norm2();
  double denom_sign = 1.0;
  if (stats_ == Statistics::fermi) {
    const double d = field_.at_vector(l - k2) - field_.at_vector(l + k2);
    denom_sign = d >= 0.0 ? 1.0 : -1.0;
  }
  return phi_coefficient(stats_, *b, l2_greater, denom_sign);
}

PairEntry PairFieldSolution::entry(const Vec3i& n) const {
  if (std::abs(n.x) <= table_radius_ && std::abs(n.y) <= table_radius_ &&
      std::abs(n.z) <= table_radius_) {
    return table_[pack_cube(n, table_radius_)];
  }
  return compute_entry(n);
}

Complex PairFieldSolution::normalization_value() const {
  const Complex pp = entry(k2n_).phi;
  const Complex pm = entry(-k2n_).phi;
  if (stats_ == Statistics::bose) return 0.5 * (pp + pm);
  return (pm - pp) / (2.0 * kImag);
}

double PairFieldSolution::shell_max_phi(int radius) const {
  double worst = 0.0;
  if (radius <= 48) {
    const std::int64_t r2hi = std::int64_t(radius) * radius;
    const std::int64_t r2lo = std::int64_t(radius - 1) * (radius - 1);
    for (int i = -radius; i <= radius; ++i)
      for (int j = -radius; j <= radius; ++j)
        for (int k = -radius; k <= radius; ++k) {
          const Vec3i n{i, j, k};
          const auto n2 = n.norm2();
          if (n2 <= r2lo || n2 > r2hi) continue;
          worst = std::max(worst, std::abs(compute_entry(n).phi));
        }
    return worst;
  }
  static const std::vector<Vec3> dirs = shell_directions();
  for (const Vec3& d : dirs) {
    const Vec3i n{int(std::lround(d.x * radius)), int(std::lround(d.y * radius)),
                  int(std::lround(d.z * radius))};
    if (n == Vec3i{0, 0, 0}) continue;
    worst = std::max(worst, std::abs(compute_entry(n).phi));
  }
  return worst;
}

double PairFieldSolution::boundary_phi() const { return shell_max_phi(l_max_); }

void PairFieldSolution::scale_phi(const Vec3i& n, double factor) {
  if (std::abs(n.x) > table_radius_ || std::abs(n.y) > table_radius_ ||
      std::abs(n.z) > table_radius_) {
    throw InvalidInput("scale_phi: index outside the materialized table");
  }
  table_[pack_cube(n, table_radius_)].phi *= factor;
}

PairFieldSolution solve_pairfield(Statistics stats, const CoefficientField& field, Vec3i k1,
                                  Vec3i k2, const PairFieldOptions& options) {
  if (k2 == Vec3i{0, 0, 0}) {
    throw InvalidInput("solve_pairfield: k2 must be a nonzero lattice vector");
  }
  PairFieldSolution sol;
  sol.stats_ = stats;
  sol.units_ = options.units;
  sol.field_ = field;
  sol.k1n_ = k1;
  sol.k2n_ = k2;

  const TorusGeometry& geom = sol.field_.geometry();
  const Vec3 k1v = geom.lattice_vector(k1);
  const Vec3 k2v = geom.lattice_vector(k2);
  sol.v0_ = sol.field_.at_vector({0, 0, 0});
  sol.v2k2_ = sol.field_.at_vector(k2v * 2.0);
  const double kin = options.units.kinetic_full() * (k1v.norm2() + k2v.norm2());
  sol.omega_ = stats == Statistics::bose ? kin + sol.v0_ + sol.v2k2_
                                         : kin + sol.v2k2_ - sol.v0_;

  const int k2_radius = int(std::ceil(k2.norm()));
  int radius = options.l_max;
  if (radius <= 0) {
    radius = std::max(4, 2 * k2_radius + 2);
    // make sure the coefficient field can serve the largest lookups
    sol.field_.ensure_range((double(radius) + 3.0 * k2.norm() + 2.0) * 2.0 * pi /
                            std::min(geom.L1, geom.L2));
    while (radius < options.adaptive_cap &&
           sol.shell_max_phi(radius) > options.boundary_tolerance) {
      radius *= 2;
      sol.field_.ensure_range((double(radius) + 3.0 * k2.norm() + 2.0) * 2.0 * pi /
                              std::min(geom.L1, geom.L2));
    }
  } else {
    sol.field_.ensure_range((double(radius) + 3.0 * k2.norm() + 2.0) * 2.0 * pi /
                            std::min(geom.L1, geom.L2));
  }
  sol.l_max_ = radius;
  sol.table_radius_ = std::min(radius, options.table_cap);

  const std::size_t side = 2 * std::size_t(sol.table_radius_) + 1;
  sol.table_.resize(side * side * side);
  for (int i = -sol.table_radius_; i <= sol.table_radius_; ++i)
    for (int j = -sol.table_radius_; j <= sol.table_radius_; ++j)
      for (int k = -sol.table_radius_; k <= sol.table_radius_; ++k) {
        const Vec3i n{i, j, k};
        sol.table_[pack_cube(n, sol.table_radius_)] = sol.compute_entry(n);
      }
  return sol;
}

ResidualReport hamiltonian_residual(const PairFieldSolution& sol,
                                    const ResidualOptions& options) {
  ResidualReport rep;
  const TorusGeometry& geom = sol.geometry();
  const Units& units = sol.units();
  const Vec3 k1 = sol.k1();
  const Vec3 k2 = sol.k2();
  const CoefficientField& field = sol.field();

  const int k2_radius = int(std::ceil(sol.k2_index().norm()));
  int radius = options.scan_radius;
  if (radius <= 0) {
    radius = std::max(1, sol.l_max() - 2 * k2_radius);
    // keep the exhaustive scan within budget
    while (8.0 * double(radius + 1) * double(radius + 1) * double(radius + 1) >
           double(options.mode_budget) && radius > 4) {
      radius = radius * 3 / 4;
    }
  }
  rep.scan_radius = radius;

  const Complex phi_p = sol.entry(sol.k2_index()).phi;
  const Complex phi_m = sol.entry(-sol.k2_index()).phi;
  const double v0 = field.at_vector({0, 0, 0});
  const double v2k2 = field.at_vector(k2 * 2.0);

  const double kin_pair = units.kinetic_full() * (k1.norm2() + k2.norm2());

  double sup1 = 0.0;
  std::int64_t scanned = 0;
  for (int i = -radius; i <= radius; ++i) {
    for (int j = -radius; j <= radius; ++j) {
      for (int k = -radius; k <= radius; ++k) {
        const Vec3i n{i, j, k};
        if (n.norm2() > std::int64_t(radius) * radius) continue;
        ++scanned;
        const Vec3 l = geom.lattice_vector(n);
        const Complex phi_l = sol.entry(n).phi;
        const Complex phi_ml = sol.entry(-n).phi;
        const double vm = field.at_vector(l - k2);
        const double vp = field.at_vector(l + k2);
        const double kin_l = units.kinetic_full() * (k1.norm2() + l.norm2());
        Complex r1;
        if (sol.statistics() == Statistics::bose) {
          r1 = (kin_l - sol.omega()) * phi_l +
               (vm + vp) * (phi_p * phi_m + phi_l * phi_ml);
        } else {
          r1 = (kin_l - sol.omega()) * phi_l -
               kImag * (phi_p * phi_p * vm - phi_m * phi_m * vp) -
               kImag * phi_l * phi_l * (vm - vp);
        }
        sup1 = std::max(sup1, std::abs(r1));
      }
    }
  }
  rep.sup_residual_first = sup1;
  rep.modes_scanned = scanned;

  Complex r2p, r2m;
  if (sol.statistics() == Statistics::bose) {
    r2p = 0.5 * (kin_pair - sol.omega()) + (v0 + v2k2) * phi_p;
    r2m = 0.5 * (kin_pair - sol.omega()) + (v0 + v2k2) * phi_m;
  } else {
    r2p = -0.5 * kImag * (kin_pair - sol.omega()) + (v2k2 - v0) * phi_p;
    r2m = 0.5 * kImag * (kin_pair - sol.omega()) + (v2k2 - v0) * phi_m;
  }
  rep.sup_residual_second = std::max(std::abs(r2p), std::abs(r2m));

  rep.normalization_magnitude = std::abs(sol.normalization_value());

  double omega_again;
  if (sol.statistics() == Statistics::bose) {
    omega_again = kin_pair + v0 + v2k2;
  } else {
    omega_again = kin_pair + v2k2 - v0;
  }
  rep.omega_consistency = std::abs(sol.omega() - omega_again);

  rep.boundary_phi = sol.boundary_phi();
  rep.truncation_warning = rep.boundary_phi > options.boundary_tolerance;
  return rep;
}

double normalization_check(const PairFieldSolution& sol) {
  return std::abs(sol.normalization_value());
}

LimitingCoefficients limiting_coefficients(const Vec3& k2, const Vec3& l, double V0,
                                           const Units& units) {
  LimitingCoefficients out;
  const double a = units.kinetic_half();
  out.b0 = a * (l.norm2() - k2.norm2()) / V0 - 1.0;
  out.plus_branch = l.norm2() > k2.norm2();
  if (l.norm2() == k2.norm2()) {
    out.phi0 = Complex(0.5, 0.0);
    return out;
  }
  // closed form: ( (a (k2^2 - l^2) + V0) +- sqrt((...)^2 - V0^2) ) / (2 V0)
  const double head = a * (k2.norm2() - l.norm2()) + V0;
  const Complex root = std::sqrt(Complex(head * head - V0 * V0, 0.0));
  out.phi0 = (Complex(head, 0.0) + (out.plus_branch ? root : -root)) / (2.0 * V0);
  return out;
}

EnergyReport energy_leading(const PairFieldSolution& sol, double V0) {
  EnergyReport rep;
  const Units& units = sol.units();
  const double kin_half = units.kinetic_half() * (sol.k1().norm2() + sol.k2().norm2());
  const double N = sol.geometry().N;
  const double interaction = sol.statistics() == Statistics::bose ? 0.5 * V0 : 0.0;
  rep.energy_leading = N * (kin_half + interaction);

  // discrete symbol functional on the stored data
  const Complex norm = sol.normalization_value();
  const Complex phi_p = sol.entry(sol.k2_index()).phi;
  const Complex phi_m = sol.entry(-sol.k2_index()).phi;
  const double v0 = sol.field().at_vector({0, 0, 0});
  const double v2k2 = sol.field().at_vector(sol.k2() * 2.0);
  Complex quartic;
  if (sol.statistics() == Statistics::bose) {
    quartic = phi_p * phi_m * (v0 + v2k2);
  } else {
    const Complex a_p = -kImag * (phi_p * phi_p * v0 - phi_m * phi_m * v2k2);
    const Complex a_m = -kImag * (phi_p * phi_p * v2k2 - phi_m * phi_m * v0);
    quartic = (a_m - a_p) / (2.0 * kImag);
  }
  rep.symbol_value = 2.0 * kin_half * norm + quartic;
  rep.deviation = N * rep.symbol_value.real() - rep.energy_leading;
  rep.deviation_per_particle = rep.deviation / N;
  return rep;
}

ConvergenceStudy convergence_study(Statistics stats, const TorusGeometry& box,
                                   const RadialPotential& pot, Vec3i k2,
                                   std::span<const double> n_values,
                                   const PairFieldOptions& options) {
  ConvergenceStudy study;
  const Units& units = options.units;

  bool any_nonzero = false;
  for (double N : n_values) {
    TorusGeometry geom = box;
    geom.N = N;
    CoefficientField field(geom, pot, 8.0);
    const double V0 = v0_limit(pot, geom);

    const Vec3 k2v = geom.lattice_vector(k2);
    const double k_head = std::pow(N, 1.0 / 6.0);

    // finite-N coefficient at one mode; mirrors the solver's entry rule
    auto phi_at = [&](const Vec3i& n, const Vec3& l) -> Complex {
      if (n == k2) return stats == Statistics::bose ? Complex(0.5, 0) : Complex(0, -0.5);
      if (n == -k2) return stats == Statistics::bose ? Complex(0.5, 0) : Complex(0, 0.5);
      auto b = b_coefficient(stats, field, k2v, l, units);
      if (!b) return {0.0, 0.0};
      double denom_sign = 1.0;
      if (stats == Statistics::fermi) {
        const double d = field.at_vector(l - k2v) - field.at_vector(l + k2v);
        denom_sign = d >= 0.0 ? 1.0 : -1.0;
      }
      return phi_coefficient(stats, *b, l.norm2() > k2v.norm2(), denom_sign).phi;
    };
    // limiting coefficient: bosons go to the closed form, fermion off-pair
    // modes vanish (their denominators close up)
    auto phi_limit = [&](const Vec3i& n, const Vec3& l) -> Complex {
      if (n == k2) return stats == Statistics::bose ? Complex(0.5, 0) : Complex(0, -0.5);
      if (n == -k2) return stats == Statistics::bose ? Complex(0.5, 0) : Complex(0, 0.5);
      if (V0 == 0.0 || stats == Statistics::fermi) return {0.0, 0.0};
      return limiting_coefficients(k2v, l, V0, units).phi0;
    };

    ConvergenceRow row;
    row.N = N;

    // head: exhaustive over physical |l| <= N^(1/6)
    const int nx = int(std::floor(k_head * geom.L1 / (2.0 * pi)));
    const int nyz = int(std::floor(k_head * geom.L2 / (2.0 * pi)));
    field.ensure_range(k_head + 3.0 * k2v.norm() + 2.0);
    for (int i = -nx; i <= nx; ++i) {
      for (int j = -nyz; j <= nyz; ++j) {
        for (int k = -nyz; k <= nyz; ++k) {
          const Vec3i n{i, j, k};
          const Vec3 l = geom.lattice_vector(n);
          if (l.norm2() > k_head * k_head) continue;
          row.head_deviation =
              std::max(row.head_deviation, std::abs(phi_at(n, l) - phi_limit(n, l)));
        }
      }
    }

    // tail: geometric physical shells sampled over deterministic directions
    static const std::vector<Vec3> dirs = shell_directions();
    const double lattice_density = geom.volume() / std::pow(2.0 * pi, 3.0);
    double k_lo = k_head;
    double total_sq = 0.0, total_abs = 0.0;
    for (int shell = 0; shell < 400; ++shell) {
      const double k_hi = k_lo * 1.06;
      const double k_mid = 0.5 * (k_lo + k_hi);
      field.ensure_range(k_hi + 3.0 * k2v.norm() + 2.0);
      double mean_sq = 0.0, mean_abs = 0.0;
      int used = 0;
      for (const Vec3& d : dirs) {
        const Vec3 l = d * k_mid;
        auto b = b_coefficient(stats, field, k2v, l, units);
        Complex phi{0.0, 0.0};
        if (b) {
          double denom_sign = 1.0;
          if (stats == Statistics::fermi) {
            const double dd = field.at_vector(l - k2v) - field.at_vector(l + k2v);
            denom_sign = dd >= 0.0 ? 1.0 : -1.0;
          }
          phi = phi_coefficient(stats, *b, l.norm2() > k2v.norm2(), denom_sign).phi;
        }
        mean_sq += std::norm(phi);
        mean_abs += std::abs(phi);
        ++used;
      }
      mean_sq /= used;
      mean_abs /= used;
      const double count = 4.0 * pi * k_mid * k_mid * (k_hi - k_lo) * lattice_density;
      total_sq += count * mean_sq;
      total_abs += count * mean_abs;
      if (shell > 24 && count * mean_sq < 1e-5 * total_sq) break;
      k_lo = k_hi;
    }
    row.tail_sq_sum = total_sq;
    row.tail_abs_sum = total_abs;
    if (total_sq > 0.0 || row.head_deviation > 0.0) any_nonzero = true;
    study.rows.push_back(row);
  }

  study.all_zero = !any_nonzero;
  if (!study.all_zero && study.rows.size() >= 2) {
    std::vector<double> lx, lh, lt;
    for (const auto& r : study.rows) {
      if (r.head_deviation > 0.0 && r.tail_sq_sum > 0.0) {
        lx.push_back(std::log(r.N));
        lh.push_back(std::log(r.head_deviation));
        lt.push_back(std::log(r.tail_sq_sum));
      }
    }
    if (lx.size() >= 2) {
      study.head_exponent = fit::fit_line(lx, lh).slope;
      study.tail_exponent = fit::fit_line(lx, lt).slope;
    }
  }
  return study;
}

}  // namespace exspec

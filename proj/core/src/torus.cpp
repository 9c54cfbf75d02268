#include "exspec/torus.hpp"

#include <algorithm>
#include <cmath>

#include "exspec/errors.hpp"

namespace exspec {

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1] for the direct 3D check.
constexpr double kGl16X[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
constexpr double kGl16W[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

}  // namespace

CoefficientField::CoefficientField(TorusGeometry geom, RadialPotential pot, double k_hint,
                                   double quad_tolerance)
    : geom_(geom), pot_(std::move(pot)), quad_tolerance_(quad_tolerance),
      inv_volume_(1.0 / geom.volume()) {
  if (geom_.scaled_box_radius() < pot_.tail_start) {
    throw BoxTooSmall("scaled box radius " + std::to_string(geom_.scaled_box_radius()) +
                      " smaller than the potential's trusted range " +
                      std::to_string(pot_.tail_start) + "; increase N or the box");
  }
  bound_ = coefficient_bound(geom_, pot_, quad_tolerance_);
  build(std::max(k_hint * geom_.momentum_scale(), 16.0 * geom_.momentum_scale()));
}

void CoefficientField::build(double k_max) {
  TransformSettings ts;
  ts.tolerance = quad_tolerance_;
  ts.r_max = geom_.scaled_box_radius();
  const double dk = std::min(5e-3, k_max / 1024.0);
  const int count = int(std::ceil(k_max / dk)) + 1;
  std::vector<double> grid(count);
  for (int i = 0; i < count; ++i) grid[i] = k_max * double(i) / double(count - 1);
  spectrum_ = fourier_transform(pot_, grid, ts);
}

void CoefficientField::ensure_range(double q_mag) {
  const double k_needed = q_mag * geom_.momentum_scale();
  if (k_needed > spectrum_.p_max()) build(k_needed * 1.25);
}

double CoefficientField::at_vector(const Vec3& q) const {
  return spectrum_.value(q.norm() * geom_.momentum_scale()) * inv_volume_;
}

double fourier_coefficient(const CoefficientField& field, const Vec3i& n) {
  return field.at_index(n);
}

double fourier_coefficient_direct(const TorusGeometry& geom, const RadialPotential& pot,
                                  const Vec3i& n, int nodes_per_axis) {
  const double rho = std::min(pot.tail_start, geom.scaled_box_radius());
  const Vec3 k = geom.lattice_vector(n) * geom.momentum_scale();

  // Tensor Gauss-Legendre over [-rho, rho]^3; panels of 16 nodes per axis.
  const int panels = std::max(1, nodes_per_axis / 16);
  std::vector<double> xs, ws;
  for (int p = 0; p < panels; ++p) {
    const double a = -rho + 2.0 * rho * p / panels;
    const double b = -rho + 2.0 * rho * (p + 1) / panels;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < 8; ++i) {
      xs.push_back(mid - half * kGl16X[i]);
      ws.push_back(half * kGl16W[i]);
      xs.push_back(mid + half * kGl16X[i]);
      ws.push_back(half * kGl16W[i]);
    }
  }
  double sum = 0.0;
  for (std::size_t a = 0; a < xs.size(); ++a) {
    for (std::size_t b = 0; b < xs.size(); ++b) {
      double partial = 0.0;
      for (std::size_t c = 0; c < xs.size(); ++c) {
        const double r = std::sqrt(xs[a] * xs[a] + xs[b] * xs[b] + xs[c] * xs[c]);
        partial += ws[c] * pot(r) * std::cos(k.x * xs[a] + k.y * xs[b] + k.z * xs[c]);
      }
      sum += ws[a] * ws[b] * partial;
    }
  }
  return sum / geom.volume();
}

double coefficient_bound(const TorusGeometry& geom, const RadialPotential& pot,
                         double quad_tolerance) {
  if (pot.tail_coefficient != 0.0 && pot.tail_exponent <= 3.0) {
    throw NonIntegrableTail("coefficient_bound: |V| is not integrable");
  }
  quad::PanelSettings ps;
  ps.max_panel = std::min(0.25, pot.tail_start / 16.0);
  ps.tolerance = quad_tolerance;
  auto body = quad::integrate_panels(
      [&](double r) { return std::abs(pot.r_times_v(r)) * r; }, 0.0, pot.tail_start, ps);
  const double tail =
      std::abs(quad::power_tail_moment(pot.tail_coefficient, pot.tail_exponent, pot.tail_start));
  return 4.0 * pi * (body.value + tail) / geom.volume();
}

double v0_limit(const RadialPotential& pot, const TorusGeometry& geom, double quad_tolerance) {
  TransformSettings ts;
  ts.tolerance = quad_tolerance;
  return fourier_transform_at(pot, 0.0, ts) / geom.volume();
}

FourierCoefficients::FourierCoefficients(const CoefficientField& field, int n_max)
    : n_max_(n_max), bound_(field.bound()) {
  const std::size_t side = 2 * std::size_t(n_max) + 1;
  table_.resize(side * side * side);
  const TorusGeometry& geom = field.geometry();
  double q_max = geom.lattice_vector(n_max, n_max, n_max).norm();
  const_cast<CoefficientField&>(field).ensure_range(q_max);

  for (int i = -n_max_; i <= n_max_; ++i) {
    for (int j = -n_max_; j <= n_max_; ++j) {
      for (int k = -n_max_; k <= n_max_; ++k) {
        const double v = field.at_index({i, j, k});
        if (std::abs(v) > bound_ * (1.0 + 1e-9) + 1e-14) {
          throw InvalidInput("coefficient table: |v_q| exceeds the absolute-integral bound");
        }
        table_[pack(i, j, k)] = v;
      }
    }
  }
  // Reject any asymmetric content: v_q must equal v_{-q} entry by entry.
  for (int i = -n_max_; i <= n_max_; ++i)
    for (int j = -n_max_; j <= n_max_; ++j)
      for (int k = -n_max_; k <= n_max_; ++k)
        if (table_[pack(i, j, k)] != table_[pack(-i, -j, -k)]) {
          throw InvalidInput("coefficient table: v_q != v_{-q}");
        }
}

std::size_t FourierCoefficients::pack(int n1, int n2, int n3) const {
  const std::size_t side = 2 * std::size_t(n_max_) + 1;
  return (std::size_t(n1 + n_max_) * side + std::size_t(n2 + n_max_)) * side +
         std::size_t(n3 + n_max_);
}

double FourierCoefficients::at(int n1, int n2, int n3) const {
  if (std::abs(n1) > n_max_ || std::abs(n2) > n_max_ || std::abs(n3) > n_max_) {
    throw MissingCoefficient("coefficient (" + std::to_string(n1) + "," + std::to_string(n2) +
                             "," + std::to_string(n3) + ") outside the table radius " +
                             std::to_string(n_max_));
  }
  return table_[pack(n1, n2, n3)];
}

double uniformity_deviation(const CoefficientField& field, const Vec3i& k2, int radius) {
  double worst = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    for (int j = -radius; j <= radius; ++j) {
      for (int k = -radius; k <= radius; ++k) {
        const Vec3i l{i, j, k};
        if (l.norm2() > std::int64_t(radius) * radius) continue;
        const double a = field.at_index(l + k2 * 3);
        const double b = field.at_index(l - k2);
        worst = std::max(worst, std::abs(a - b));
      }
    }
  }
  return worst;
}

}  // namespace exspec

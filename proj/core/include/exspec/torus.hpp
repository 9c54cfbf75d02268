#pragma once

#include <vector>

#include "exspec/common.hpp"
#include "exspec/potentials.hpp"

namespace exspec {

/// Periodic box with sides L1, L2, L2 holding N particles. Momentum lattice
/// vectors are 2 pi (n1/L1, n2/L2, n3/L2).
struct TorusGeometry {
  double L1 = 2.0 * pi;
  double L2 = 2.0 * pi;
  double N = 1.0;

  double volume() const { return L1 * L2 * L2; }
  double cbrt_n() const { return std::cbrt(N); }
  /// Momentum-scale contraction of the pair potential: arguments of the
  /// radial transform are |q| / N^(1/3).
  double momentum_scale() const { return 1.0 / cbrt_n(); }
  /// Radius of the ball inscribed in the N^(1/3)-scaled box.
  double scaled_box_radius() const { return cbrt_n() * std::min(L1, L2) / 2.0; }

  Vec3 lattice_vector(int n1, int n2, int n3) const {
    return {2.0 * pi * n1 / L1, 2.0 * pi * n2 / L2, 2.0 * pi * n3 / L2};
  }
  Vec3 lattice_vector(const Vec3i& n) const { return lattice_vector(n.x, n.y, n.z); }
};

/// Fourier coefficients v_q of the N-scaled potential N V(N^(1/3) x) on the
/// box: after the change of variables xi = N^(1/3) x,
///   v_q = (1 / (L1 L2^2)) Int_{scaled box} V(xi) exp(-i q.xi / N^(1/3)) dxi,
/// which for a radial V is the box-truncated radial transform evaluated at
/// |q| / N^(1/3), divided by the volume. Values are real and even in q by
/// construction.
class CoefficientField {
 public:
  CoefficientField(TorusGeometry geom, RadialPotential pot, double k_hint = 4.0,
                   double quad_tolerance = 1e-10);

  const TorusGeometry& geometry() const { return geom_; }
  const RadialPotential& potential() const { return pot_; }

  /// v at an arbitrary momentum vector q (any vector, not only lattice points).
  double at_vector(const Vec3& q) const;
  /// v at a lattice index triple.
  double at_index(const Vec3i& n) const { return at_vector(geom_.lattice_vector(n)); }

  double v0() const { return spectrum_.at_zero() * inv_volume_; }

  /// Absolute-integral bound B = (1 / (L1 L2^2)) Int_{R^3} |V|; every
  /// coefficient satisfies |v_q| <= B.
  double bound() const { return bound_; }

  /// Grow the cached spectrum so momenta up to |q| can be evaluated.
  /// Not thread safe; call before sharing across workers.
  void ensure_range(double q_mag);

  double max_q() const { return spectrum_.p_max() / geom_.momentum_scale(); }

 private:
  void build(double k_max);

  TorusGeometry geom_;
  RadialPotential pot_;
  double quad_tolerance_;
  double inv_volume_;
  double bound_ = 0.0;
  RadialSpectrum spectrum_;  // box-truncated transform, argument |q| * N^(-1/3)
};

/// Single coefficient at a lattice index (convenience wrapper used by the CLI
/// and tests).
double fourier_coefficient(const CoefficientField& field, const Vec3i& n);

/// Direct 3D tensor-quadrature cross-check of one coefficient. Integrates the
/// scaled integrand over the sub-box [-rho, rho]^3 that contains the support;
/// intended for compactly supported potentials.
double fourier_coefficient_direct(const TorusGeometry& geom, const RadialPotential& pot,
                                  const Vec3i& n, int nodes_per_axis = 48);

/// B of the bound above, computed independently of any CoefficientField.
double coefficient_bound(const TorusGeometry& geom, const RadialPotential& pot,
                         double quad_tolerance = 1e-10);

/// V0 = (1 / (L1 L2^2)) Int_{R^3} V(x) dx, the q = 0 limit.
double v0_limit(const RadialPotential& pot, const TorusGeometry& geom,
                double quad_tolerance = 1e-10);

/// Dense symmetric table of coefficients for |n_i| <= n_max. Reads outside
/// the cube throw MissingCoefficient.
class FourierCoefficients {
 public:
  FourierCoefficients(const CoefficientField& field, int n_max);

  int n_max() const { return n_max_; }
  double at(int n1, int n2, int n3) const;
  double at(const Vec3i& n) const { return at(n.x, n.y, n.z); }
  double bound() const { return bound_; }

  /// Lexicographic traversal (n1 outer, n3 inner) for deterministic export.
  template <typename F>
  void for_each(F&& f) const {
    for (int i = -n_max_; i <= n_max_; ++i)
      for (int j = -n_max_; j <= n_max_; ++j)
        for (int k = -n_max_; k <= n_max_; ++k) f(Vec3i{i, j, k}, at(i, j, k));
  }

 private:
  std::size_t pack(int n1, int n2, int n3) const;
  int n_max_;
  double bound_;
  std::vector<double> table_;
};

/// Max over |l|_lattice <= radius of |v_{l+3 k2} - v_{l-k2}|, the uniformity
/// deviation that controls the block-matrix approximation; shrinks as N grows.
double uniformity_deviation(const CoefficientField& field, const Vec3i& k2, int radius);

}  // namespace exspec

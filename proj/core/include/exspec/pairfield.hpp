#pragma once

#include <optional>
#include <span>
#include <vector>

#include "exspec/common.hpp"
#include "exspec/torus.hpp"

namespace exspec {

/// Options for building a pair-field solution. l_max = 0 requests the
/// adaptive truncation: the lattice radius is doubled until |phi| on the
/// boundary shell falls below boundary_tolerance.
struct PairFieldOptions {
  Units units;
  int l_max = 0;
  double boundary_tolerance = 1e-10;
  int table_cap = 40;       // largest radius materialized into the dense table
  int adaptive_cap = 2048;  // hard stop for the adaptive doubling
};

struct PairEntry {
  Complex phi{0.0, 0.0};
  double b = 0.0;
  bool degenerate = false;    // vanishing denominator: free-solution branch
  bool complex_flag = false;  // bosonic phi left the real branch (|b| < 1)
};

/// b_{k2,l}; empty when the denominator vanishes and the caller must fall
/// back to the free solution (phi = 0 away from l = +-k2).
std::optional<double> b_coefficient(Statistics stats, const CoefficientField& field,
                                    const Vec3& k2, const Vec3& l, const Units& units);

/// Branch rule for phi given b. For bosons the sign of the square root is +
/// when l^2 > k2^2 and - when l^2 < k2^2; |b| < 1 leaves the real branch and
/// is flagged. For fermions denom_sign = sign(v_{l-k2} - v_{l+k2}) selects the
/// antisymmetric root; |b| > 1 gives the purely imaginary decaying root.
PairEntry phi_coefficient(Statistics stats, double b, bool l2_greater, double denom_sign);

/// Exact solution of the pair-field Hamiltonian system at flow parameter k1
/// and transverse mode k2 (both lattice index triples, k2 != 0).
class PairFieldSolution {
 public:
  Statistics statistics() const { return stats_; }
  const Units& units() const { return units_; }
  const TorusGeometry& geometry() const { return field_.geometry(); }
  const CoefficientField& field() const { return field_; }
  const Vec3i& k1_index() const { return k1n_; }
  const Vec3i& k2_index() const { return k2n_; }
  Vec3 k1() const { return geometry().lattice_vector(k1n_); }
  Vec3 k2() const { return geometry().lattice_vector(k2n_); }
  int l_max() const { return l_max_; }
  int table_radius() const { return table_radius_; }
  double omega() const { return omega_; }

  /// Coefficient entry at lattice index n; cached inside the table radius,
  /// recomputed from the closed form outside (pure, thread safe).
  PairEntry entry(const Vec3i& n) const;
  Complex phi(const Vec3i& n) const { return entry(n).phi; }

  /// (phi_{k2} + phi_{-k2}) / 2 for bosons, (phi_{-k2} - phi_{k2}) / (2i) for
  /// fermions: the number-conservation integral; contract magnitude 1/2.
  Complex normalization_value() const;

  /// Largest |phi| on the truncation shell (exact enumeration at small radii,
  /// deterministic direction sampling at large ones).
  double boundary_phi() const;

  /// Residual-probe hook: rescales one cached coefficient.
  void scale_phi(const Vec3i& n, double factor);

  /// Deterministic traversal of the materialized cube for export.
  template <typename F>
  void for_each_table_entry(F&& f) const {
    for (int i = -table_radius_; i <= table_radius_; ++i)
      for (int j = -table_radius_; j <= table_radius_; ++j)
        for (int k = -table_radius_; k <= table_radius_; ++k) {
          const Vec3i n{i, j, k};
          f(n, entry(n));
        }
  }

  friend PairFieldSolution solve_pairfield(Statistics stats, const CoefficientField& field,
                                           Vec3i k1, Vec3i k2, const PairFieldOptions& options);

 private:
  PairEntry compute_entry(const Vec3i& n) const;
  double shell_max_phi(int radius) const;

  Statistics stats_ = Statistics::bose;
  Units units_;
  CoefficientField field_{TorusGeometry{}, make_zero()};
  Vec3i k1n_, k2n_;
  int l_max_ = 0;
  int table_radius_ = 0;
  double omega_ = 0.0;
  double v0_ = 0.0, v2k2_ = 0.0;
  std::vector<PairEntry> table_;
};

PairFieldSolution solve_pairfield(Statistics stats, const CoefficientField& field, Vec3i k1,
                                  Vec3i k2, const PairFieldOptions& options = {});

struct ResidualOptions {
  int scan_radius = 0;          // 0 = derive from l_max and the mode budget
  std::int64_t mode_budget = 500000;
  double boundary_tolerance = 1e-10;
};

struct ResidualReport {
  double sup_residual_first = 0.0;   // Phi equation, sup over scanned modes
  double sup_residual_second = 0.0;  // Phi+ equation, its two modes
  double normalization_magnitude = 0.0;
  double omega_consistency = 0.0;
  double boundary_phi = 0.0;
  std::int64_t modes_scanned = 0;
  int scan_radius = 0;
  bool truncation_warning = false;  // boundary |phi| above tolerance
};

/// Substitutes the stored coefficient tables back into the Hamiltonian system
/// in Fourier space and measures mode-wise residuals. The system decouples
/// per mode, so every covered mode of an uncorrupted solution is zero to
/// rounding.
ResidualReport hamiltonian_residual(const PairFieldSolution& sol,
                                    const ResidualOptions& options = {});

/// Magnitude of the number-conservation integral; contract: 1/2.
double normalization_check(const PairFieldSolution& sol);

struct LimitingCoefficients {
  double b0 = 0.0;
  Complex phi0{0.0, 0.0};
  bool plus_branch = false;
};

/// N -> infinity limits: b0 = hbar^2 (l^2 - k2^2) / (2 m V0) - 1 and the
/// closed-form phi0 with the +/- branch picked by l^2 vs k2^2.
LimitingCoefficients limiting_coefficients(const Vec3& k2, const Vec3& l, double V0,
                                           const Units& units = {});

struct EnergyReport {
  double energy_leading = 0.0;   // N (hbar^2 (k1^2+k2^2) / 2m + V0/2) [bose]
  Complex symbol_value{0.0, 0.0};  // discrete symbol functional on the stored data
  double deviation = 0.0;          // N * Re(symbol) - energy_leading
  double deviation_per_particle = 0.0;
};

/// Leading eigenvalue asymptotics and the discrete symbol functional
/// evaluated on the stored Fourier data. The interaction part of the leading
/// term is V0/2 for bosons and cancels for fermions.
EnergyReport energy_leading(const PairFieldSolution& sol, double V0);

struct ConvergenceRow {
  double N = 0.0;
  double head_deviation = 0.0;  // max |phi(N) - phi0| over |l| <= N^(1/6)
  double tail_sq_sum = 0.0;     // sum |phi|^2 over |l| > N^(1/6)
  double tail_abs_sum = 0.0;    // shell-sampled sum |phi| (diagnostic)
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  double head_exponent = 0.0;  // log-log slope of head_deviation vs N
  double tail_exponent = 0.0;  // log-log slope of tail_sq_sum vs N
  bool all_zero = false;       // zero potential: both metrics vanish exactly
};

/// Head/tail split of the series at |l| = N^(1/6) across a geometric N
/// sequence; the head converges to the limiting coefficients, the square-sum
/// tail decays like a power of N.
ConvergenceStudy convergence_study(Statistics stats, const TorusGeometry& box,
                                   const RadialPotential& pot, Vec3i k2,
                                   std::span<const double> n_values,
                                   const PairFieldOptions& options = {});

}  // namespace exspec

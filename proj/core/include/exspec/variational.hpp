#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>
#include <vector>

#include "exspec/common.hpp"
#include "exspec/pairfield.hpp"
#include "exspec/torus.hpp"

namespace exspec {

/// phi_{k2,l} from the closed-form entry rule shared with the pair-field
/// solver; exact pair values at l = +-k2.
Complex pair_phi(Statistics stats, const CoefficientField& field, const Vec3& k2, const Vec3& l,
                 const Units& units);

/// The closed 4x4 subsystem of the variational equations around a pair-field
/// solution, for the coefficient column (u1, u2, v1, v2) at mode l.
struct VariationalBlock {
  Statistics statistics = Statistics::bose;
  Units units;
  Vec3 l, k1, k2;
  Eigen::Matrix4cd M;
  Complex B_l{0, 0}, B_l1{0, 0};
  double V_l = 0.0, V_l_plus = 0.0, V_l_minus = 0.0;  // V_l_minus is defined but unused in the
                                                      // printed eigenvalue formula
  Complex phi_l{0, 0}, phi_l1{0, 0};
  // plane-wave exponent pairs coupled by each row of the ansatz
  std::array<std::pair<Vec3, Vec3>, 4> couplings;

  /// Deviation from the 2x2 block approximation [[C, -V_l I], [D, -C]]; only
  /// the two upper-right entries differ and the gap shrinks as N grows.
  double block_form_deviation() const {
    return std::max(std::abs(M(0, 2) + Complex(V_l, 0.0)),
                    std::abs(M(1, 3) + Complex(V_l, 0.0)));
  }
};

/// Populates the printed 4x4 matrix entry by entry. phi values come from the
/// shared entry rule. Requires l != -k2.
VariationalBlock build_matrix(Statistics stats, const CoefficientField& field, const Vec3& l,
                              const Vec3& k1, const Vec3& k2, const Units& units = {});

/// Lattice-index convenience overload.
VariationalBlock build_matrix(Statistics stats, const CoefficientField& field, const Vec3i& l,
                              const Vec3i& k1, const Vec3i& k2, const Units& units = {});

struct BranchSpectrum {
  std::array<Complex, 4> lambda_tilde{};  // eigenvalues of M
  std::array<Complex, 4> lambda{};        // shifted: lambda_tilde - (hbar^2/m) k1.(k2+l)
  std::array<double, 4> residual{};       // ||M x - lambda x|| per pair
  std::array<bool, 4> real_flag{};
  double doppler_shift = 0.0;             // (hbar^2/m) k1.(k2+l)
  bool defective = false;                 // eigenvector basis close to singular
};

/// Direct dense eigensolve of the block; ground truth for every comparison.
BranchSpectrum eigenvalues(const VariationalBlock& block);

/// The printed closed-form eigenvalue expression, both sign choices, radicands
/// taken as complex. Reading A is verbatim; reading B substitutes l1 into the
/// coefficients of the duplicated squared term as well.
std::array<Complex, 4> closed_form_bose(const Vec3& l, const Vec3& k1, const Vec3& k2, double a,
                                        double V_l, double V_l_plus);
std::array<Complex, 4> closed_form_bose_alt(const Vec3& l, const Vec3& k1, const Vec3& k2,
                                            double a, double V_l, double V_l_plus, double V_l1,
                                            double V_l1_plus);

struct BogolyubovValue {
  double value = 0.0;
  bool unstable = false;  // radicand < 0
};

/// lambda = -(hbar^2/m) k1 l + sqrt((hbar^2 l^2 / 2m + v_l)^2 - v_l^2).
BogolyubovValue bogolyubov_limit(double l, double k1, double v_l, const Units& units = {});

/// k2 = 0 fermionic branches:
///   lambda1 = -(hbar^2/m) l k1 + hbar^2 l^2 / 2m
///   lambda2 = -(hbar^2/m) l k1 + |hbar^2 l^2 / 2m + v_l - v_0|
std::pair<double, double> fermi_limit(double l, double k1, double v_l, double v_0,
                                      const Units& units = {});

struct LimitStep {
  double k2_mag = 0.0;
  double deviation = 0.0;
};

struct LimitReport {
  std::vector<LimitStep> steps;
  double fitted_order = 0.0;
  double terminal_deviation = 0.0;
  bool exact_zero = false;  // every step deviated by rounding only
};

/// Shrinks |k2| geometrically inside a fixed coefficient field and measures
/// how the numerically diagonalized spectra approach the k2 = 0 branch
/// formulas (Bogolyubov for bosons, lambda1/lambda2 for fermions). The branch
/// targets carry the matrix's own k2-shifted kinetic term so the free gas
/// matches exactly at every step.
LimitReport limit_consistency(Statistics stats, const CoefficientField& field, const Vec3i& l,
                              const Vec3i& k1, int n_steps = 6, const Units& units = {});

struct GapBranch {
  double g = 0.0;          // linear coefficient of lambda(|k2|)
  double intercept = 0.0;  // extrapolated lambda(0)
  double r2 = 0.0;         // of the plain linear fit
  bool went_complex = false;
};

struct GapEstimate {
  std::vector<GapBranch> branches;
  double min_abs_g = 0.0;  // first-approximation gap rate
};

/// Fits lambda(k2) = lambda(0) + g |k2| + O(k2^2) per branch over a set of
/// small k2 magnitudes (>= 3). Branches whose eigenvalues leave the real axis
/// are flagged, not filtered.
GapEstimate gap_estimate(Statistics stats, const CoefficientField& field, const Vec3i& l,
                         const Vec3i& k1, std::span<const double> k2_mags,
                         const Units& units = {});

// --- eigensolve oracle utilities (also used by the verification suites) ---

/// Monic characteristic polynomial coefficients c0..c3 of a 4x4 complex
/// matrix (p(x) = x^4 + c3 x^3 + c2 x^2 + c1 x + c0), by Faddeev-LeVerrier.
std::array<Complex, 4> characteristic_polynomial(const Eigen::Matrix4cd& m);

/// Durand-Kerner roots of a monic quartic given (c0, c1, c2, c3).
std::array<Complex, 4> quartic_roots(const std::array<Complex, 4>& coeffs);

/// Min over pairings of the max elementwise distance between two 4-element
/// complex multisets.
double multiset_distance(std::span<const Complex> a, std::span<const Complex> b);

}  // namespace exspec

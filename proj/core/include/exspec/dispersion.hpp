#pragma once

#include <optional>
#include <span>
#include <vector>

#include "exspec/common.hpp"
#include "exspec/potentials.hpp"
#include "exspec/torus.hpp"

namespace exspec {

struct EpsilonValue {
  double value = 0.0;      // real branch; drift-free excitation energy
  bool unstable = false;   // bosonic radicand went negative
  double magnitude = 0.0;  // |sqrt(|radicand|)| when unstable
};

/// Bogolyubov branch: eps = sqrt((hbar^2 p^2/2m + Vt(p))^2 - Vt(p)^2).
EpsilonValue epsilon_bose(double p, const RadialSpectrum& spec, const Units& units = {});

/// Pair-interaction Fermi branch: eps = |hbar^2 p^2/2m + Vt(p) - Vt(0)|.
double epsilon_fermi(double p, const RadialSpectrum& spec, const Units& units = {});

struct LambdaValue {
  double value = 0.0;
  bool unstable = false;
};

/// Full dispersion with drift: lambda = -hbar^2 (p.v) + eps(|p|).
LambdaValue lambda_full(const Vec3& p, const Vec3& v, Statistics stats,
                        const RadialSpectrum& spec, const Units& units = {});

/// Dispersion sampled along a direction; lambda carries the drift term
/// -hbar^2 p (u.v) for the sampling direction u.
struct DispersionCurve {
  Statistics statistics = Statistics::fermi;
  Units units;
  Vec3 v{0, 0, 0};          // drift velocity
  Vec3 direction{1, 0, 0};  // sampling direction (unit vector)
  std::vector<double> p_grid;
  std::vector<double> epsilon;
  std::vector<double> lambda;
  std::vector<bool> unstable;
};

DispersionCurve sample_curve(Statistics stats, const RadialSpectrum& spec,
                             std::span<const double> p_grid, const Vec3& v = {0, 0, 0},
                             const Vec3& direction = {1, 0, 0}, const Units& units = {});

struct CurvePoint {
  double p = 0.0;
  double eps = 0.0;
};

struct LandauFeatures {
  double sound_slope = 0.0;           // d eps / dp at 0+
  std::optional<CurvePoint> maxon;    // first interior maximum
  std::optional<CurvePoint> roton;    // first interior minimum after the maxon
  int n_maxima = 0;
  int n_minima = 0;
  double critical_velocity = 0.0;     // continuum criterion on the same spectrum
  double predicted_slope = 0.0;       // kappa * (-lim r^4 V) when the tail qualifies
  bool has_prediction = false;
  double slope_ratio = 0.0;           // sound_slope / predicted_slope
  double kappa = 0.0;
  bool degenerate = false;            // plateau detected during refinement
};

struct FeatureSettings {
  double golden_tol = 1e-8;      // refinement tolerance in p
  int sound_levels = 4;          // Richardson levels for the small-p slope
};

/// Extracts Landau-curve features from a sampled dispersion: small-p sound
/// slope, maxon/roton by derivative sign changes refined with golden section,
/// the continuum critical velocity, and the tail-asymptotics slope prediction.
LandauFeatures landau_features(const DispersionCurve& curve, const RadialSpectrum& spec,
                               const RadialPotential& pot, const FeatureSettings& settings = {});

/// Lattice form of the flow criterion:
///   k1_max = (m/hbar^2) min_{l != 0} |(v_l - v_0)/|l| + hbar^2 |l| / 2m|.
double critical_velocity_lattice(const CoefficientField& field, int n_max,
                                 const Units& units = {});

/// Continuum form over a dense momentum grid with v_l -> Vt(l); the optimizer
/// scans the grid and refines the best cell by golden section.
double critical_velocity_continuum(const RadialSpectrum& spec, double p_lo, double p_hi,
                                   int grid_points, const Units& units = {});

struct SoundPrediction {
  double coefficient = 0.0;  // c = -kappa * lim r^4 V
  bool sign_ok = false;      // c > 0, i.e. the r^-4 tail is attractive
  double tail_limit = 0.0;
};

/// Predicted phonon slope from the potential tail; requires an r^-4 tail.
SoundPrediction sound_slope_prediction(const RadialPotential& pot);

}  // namespace exspec

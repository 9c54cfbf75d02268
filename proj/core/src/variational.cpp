#include "exspec/variational.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "exspec/errors.hpp"
#include "exspec/fitting.hpp"

namespace exspec {

namespace {

constexpr Complex kImag{0.0, 1.0};

bool same_vector(const Vec3& a, const Vec3& b) {
  return (a - b).norm2() == 0.0;
}

}  // namespace

Complex pair_phi(Statistics stats, const CoefficientField& field, const Vec3& k2, const Vec3& l,
                 const Units& units) {
  if (same_vector(l, k2)) {
    return stats == Statistics::bose ? Complex(0.5, 0.0) : Complex(0.0, -0.5);
  }
  if (same_vector(l, -k2)) {
    return stats == Statistics::bose ? Complex(0.5, 0.0) : Complex(0.0, 0.5);
  }
  auto b = b_coefficient(stats, field, k2, l, units);
  if (!b) return {0.0, 0.0};
  double denom_sign = 1.0;
  if (stats == Statistics::fermi) {
    const double d = field.at_vector(l - k2) - field.at_vector(l + k2);
    denom_sign = d >= 0.0 ? 1.0 : -1.0;
  }
  return phi_coefficient(stats, *b, l.norm2() > k2.norm2(), denom_sign).phi;
}

VariationalBlock build_matrix(Statistics stats, const CoefficientField& field, const Vec3& l,
                              const Vec3& k1, const Vec3& k2, const Units& units) {
  if (same_vector(l, -k2)) {
    throw InvalidInput("build_matrix: the closed subsystem excludes l = -k2");
  }
  VariationalBlock blk;
  blk.statistics = stats;
  blk.units = units;
  blk.l = l;
  blk.k1 = k1;
  blk.k2 = k2;

  const Vec3 l1 = l + k2 * 2.0;
  const double v0 = field.at_vector({0, 0, 0});
  const double w2 = field.at_vector(k2 * 2.0);
  const double wm = field.at_vector(l - k2);
  const double wp = field.at_vector(l + k2);
  const double w3 = field.at_vector(l + k2 * 3.0);
  const double a = units.kinetic_half();

  blk.V_l = 0.5 * (wm + wp);
  blk.V_l_plus = 0.5 * (wp + w2);
  blk.V_l_minus = 0.5 * (wm + v0);

  const Complex phi_l = pair_phi(stats, field, k2, l, units);
  const Complex phi_l1 = pair_phi(stats, field, k2, l1, units);
  blk.phi_l = phi_l;
  blk.phi_l1 = phi_l1;

  const double kin_l = a * (l.norm2() - k2.norm2());
  const double kin_l1 = a * (l1.norm2() - k2.norm2());

  Eigen::Matrix4cd& M = blk.M;
  if (stats == Statistics::bose) {
    blk.B_l = kin_l + (wm + wp) * phi_l - 0.5 * w2;
    blk.B_l1 = kin_l1 + (wp + w3) * phi_l1 - 0.5 * w2;
    M(0, 0) = blk.B_l + 0.5 * wm;
    M(0, 1) = 0.5 * (w2 + wp);
    M(0, 2) = -0.5 * (wp + wm);
    M(0, 3) = 0.0;
    M(1, 0) = 0.5 * (w2 + wp);
    M(1, 1) = blk.B_l1 + 0.5 * w3;
    M(1, 2) = 0.0;
    M(1, 3) = -0.5 * (wp + w3);
    M(2, 0) = 2.0 * (v0 + wm) * phi_l;
    M(2, 1) = (w2 + wp) * (phi_l + phi_l1);
    M(2, 2) = -blk.B_l - 0.5 * wm;
    M(2, 3) = -0.5 * (w2 + wp);
    M(3, 0) = (w2 + wp) * (phi_l + phi_l1);
    M(3, 1) = 2.0 * (v0 + w3) * phi_l1;
    M(3, 2) = -0.5 * (w2 + wp);
    M(3, 3) = -blk.B_l1 - 0.5 * w3;
  } else {
    blk.B_l = kin_l + kImag * (wp - wm) * phi_l - 0.5 * w2;
    blk.B_l1 = kin_l1 + kImag * (w3 - wp) * phi_l1 - 0.5 * w2;
    M(0, 0) = blk.B_l + 0.5 * wm;
    M(0, 1) = 0.5 * (wp - w2);
    M(0, 2) = 0.5 * (wm - wp);
    M(0, 3) = 0.0;
    M(1, 0) = 0.5 * (wp - w2);
    M(1, 1) = blk.B_l1 + 0.5 * w3;
    M(1, 2) = 0.0;
    M(1, 3) = 0.5 * (w3 - wp);
    M(2, 0) = 2.0 * kImag * (wm - v0) * phi_l;
    M(2, 1) = kImag * (w2 - wp) * (phi_l1 - phi_l);
    M(2, 2) = -blk.B_l - 0.5 * wm;
    M(2, 3) = -0.5 * (wp - w2);
    M(3, 0) = kImag * (w2 - wp) * (phi_l1 - phi_l);
    M(3, 1) = 2.0 * kImag * (v0 - w3) * phi_l1;
    M(3, 2) = -0.5 * (wp - w2);
    M(3, 3) = -blk.B_l1 - 0.5 * w3;
  }

  // which plane-wave pair each coefficient row couples (from the ansatz)
  blk.couplings[0] = {k2 - k1, l - k1};                    // u1 row of G
  blk.couplings[1] = {-k2 - k1, l1 - k1};                  // u2 row of G
  blk.couplings[2] = {k1 + k2, k1 + l};                    // v1 row of F
  blk.couplings[3] = {k1 - k2, k1 + l1};                   // v2 row of F
  return blk;
}

VariationalBlock build_matrix(Statistics stats, const CoefficientField& field, const Vec3i& l,
                              const Vec3i& k1, const Vec3i& k2, const Units& units) {
  const TorusGeometry& geom = field.geometry();
  return build_matrix(stats, field, geom.lattice_vector(l), geom.lattice_vector(k1),
                      geom.lattice_vector(k2), units);
}

BranchSpectrum eigenvalues(const VariationalBlock& block) {
  BranchSpectrum out;
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> solver(block.M, true);
  const auto& vals = solver.eigenvalues();
  const auto& vecs = solver.eigenvectors();

  out.doppler_shift = block.units.kinetic_full() * block.k1.dot(block.k2 + block.l);
  const double m_norm = block.M.norm();

  std::array<int, 4> order{0, 1, 2, 3};
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (vals(a).real() != vals(b).real()) return vals(a).real() < vals(b).real();
    return vals(a).imag() < vals(b).imag();
  });
  for (int i = 0; i < 4; ++i) {
    const Complex lt = vals(order[i]);
    out.lambda_tilde[i] = lt;
    out.lambda[i] = lt - out.doppler_shift;
    const Eigen::Vector4cd x = vecs.col(order[i]);
    out.residual[i] = (block.M * x - lt * x).norm() / std::max(m_norm, 1e-300);
    out.real_flag[i] = std::abs(lt.imag()) <= 1e-10 * (std::abs(lt) + m_norm);
  }
  Eigen::JacobiSVD<Eigen::Matrix4cd> svd(vecs);
  out.defective = svd.singularValues()(3) < 1e-8 * svd.singularValues()(0);
  return out;
}

std::array<Complex, 4> closed_form_bose(const Vec3& l, const Vec3& k1, const Vec3& k2, double a,
                                        double V_l, double V_l_plus) {
  const Vec3 l1 = l + k2 * 2.0;
  const double shift = -2.0 * a * k1.dot(k2 + l);
  const Complex term1 = 0.5 * std::pow(a * (l.norm2() - k2.norm2()) + V_l - V_l_plus, 2.0);
  const Complex term2 = 0.5 * std::pow(a * (l1.norm2() - k2.norm2()) + V_l - V_l_plus, 2.0);
  const Complex even = term1 + term2 + V_l_plus * V_l_plus - V_l * V_l;
  const double cross_coeff =
      0.5 * (a * (l1.norm2() + l.norm2() - 2.0 * k2.norm2()) + 2.0 * V_l - 2.0 * V_l_plus);
  const Complex inner = std::sqrt(Complex(
      a * a * std::pow(l1.norm2() - l.norm2(), 2.0) + 4.0 * V_l_plus * V_l_plus, 0.0));
  std::array<Complex, 4> out;
  int idx = 0;
  for (double outer : {1.0, -1.0}) {
    for (double inner_sign : {1.0, -1.0}) {
      const Complex radicand = even + inner_sign * cross_coeff * inner;
      out[idx++] = shift + outer * std::sqrt(radicand);
    }
  }
  return out;
}

std::array<Complex, 4> closed_form_bose_alt(const Vec3& l, const Vec3& k1, const Vec3& k2,
                                            double a, double V_l, double V_l_plus, double V_l1,
                                            double V_l1_plus) {
  const Vec3 l1 = l + k2 * 2.0;
  const double shift = -2.0 * a * k1.dot(k2 + l);
  const Complex term1 = 0.5 * std::pow(a * (l.norm2() - k2.norm2()) + V_l - V_l_plus, 2.0);
  const Complex term2 = 0.5 * std::pow(a * (l1.norm2() - k2.norm2()) + V_l1 - V_l1_plus, 2.0);
  const Complex even = term1 + term2 + V_l_plus * V_l_plus - V_l * V_l;
  const double cross_coeff = 0.5 * (a * (l1.norm2() + l.norm2() - 2.0 * k2.norm2()) + V_l -
                                    V_l_plus + V_l1 - V_l1_plus);
  const Complex inner = std::sqrt(Complex(
      a * a * std::pow(l1.norm2() - l.norm2(), 2.0) + 4.0 * V_l_plus * V_l1_plus, 0.0));
  std::array<Complex, 4> out;
  int idx = 0;
  for (double outer : {1.0, -1.0}) {
    for (double inner_sign : {1.0, -1.0}) {
      const Complex radicand = even + inner_sign * cross_coeff * inner;
      out[idx++] = shift + outer * std::sqrt(radicand);
    }
  }
  return out;
}

BogolyubovValue bogolyubov_limit(double l, double k1, double v_l, const Units& units) {
  BogolyubovValue out;
  const double kin = units.kinetic_half() * l * l;
  const double radicand = (kin + v_l) * (kin + v_l) - v_l * v_l;
  const double drift = -units.kinetic_full() * k1 * l;
  if (radicand < 0.0) {
    out.unstable = true;
    out.value = drift;
    return out;
  }
  out.value = drift + std::sqrt(radicand);
  return out;
}

std::pair<double, double> fermi_limit(double l, double k1, double v_l, double v_0,
                                      const Units& units) {
  const double drift = -units.kinetic_full() * l * k1;
  const double kin = units.kinetic_half() * l * l;
  return {drift + kin, drift + std::abs(kin + v_l - v_0)};
}

namespace {

// One-sided multiset deviation: every target must be realized by some
// numerical eigenvalue.
double targets_deviation(std::span<const Complex> numeric, std::span<const Complex> targets) {
  double worst = 0.0;
  for (const Complex& t : targets) {
    double best = std::numeric_limits<double>::infinity();
    for (const Complex& v : numeric) best = std::min(best, std::abs(v - t));
    worst = std::max(worst, best);
  }
  return worst;
}

std::vector<Complex> limit_targets(Statistics stats, const CoefficientField& field,
                                   const Vec3& l, const Vec3& k2, const Units& units) {
  const double a = units.kinetic_half();
  const double v0 = field.at_vector({0, 0, 0});
  std::vector<Complex> targets;
  for (const Vec3& mode : {l, l + k2 * 2.0}) {
    const double kin = a * (mode.norm2() - k2.norm2());
    const double v = field.at_vector(mode);
    if (stats == Statistics::bose) {
      const Complex s = std::sqrt(Complex((kin + v) * (kin + v) - v * v, 0.0));
      targets.push_back(s);
      targets.push_back(-s);
    } else {
      const double l2 = std::abs(kin + v - v0);
      targets.push_back(Complex(kin, 0.0));
      targets.push_back(Complex(-kin, 0.0));
      targets.push_back(Complex(l2, 0.0));
      targets.push_back(Complex(-l2, 0.0));
    }
  }
  return targets;
}

}  // namespace

LimitReport limit_consistency(Statistics stats, const CoefficientField& field, const Vec3i& l,
                              const Vec3i& k1, int n_steps, const Units& units) {
  LimitReport rep;
  const TorusGeometry& geom = field.geometry();
  const Vec3 lv = geom.lattice_vector(l);
  const Vec3 k1v = geom.lattice_vector(k1);
  const double base = 2.0 * pi / geom.L2;

  const_cast<CoefficientField&>(field).ensure_range(lv.norm() + 4.0 * base + 2.0);

  double scale = 0.0;
  for (int j = 0; j < n_steps; ++j) {
    const double mag = base / std::pow(2.0, double(j));
    const Vec3 k2v{0.0, mag, 0.0};
    auto blk = build_matrix(stats, field, lv, k1v, k2v, units);
    auto spec = eigenvalues(blk);
    auto targets = limit_targets(stats, field, lv, k2v, units);
    // compare lambda-tilde: the Doppler shift is common to both sides
    std::array<Complex, 4> numeric = spec.lambda_tilde;
    const double dev = targets_deviation(numeric, targets);
    rep.steps.push_back({mag, dev});
    for (const Complex& t : targets) scale = std::max(scale, std::abs(t));
  }
  rep.terminal_deviation = rep.steps.back().deviation;

  const double floor = 1e-12 * std::max(scale, 1.0);
  std::vector<double> lx, ly;
  for (const auto& s : rep.steps) {
    if (s.deviation > floor) {
      lx.push_back(std::log(s.k2_mag));
      ly.push_back(std::log(s.deviation));
    }
  }
  if (lx.size() < 2) {
    rep.exact_zero = true;
    rep.fitted_order = 0.0;
  } else {
    rep.fitted_order = fit::fit_line(lx, ly).slope;
  }
  return rep;
}

GapEstimate gap_estimate(Statistics stats, const CoefficientField& field, const Vec3i& l,
                         const Vec3i& k1, std::span<const double> k2_mags, const Units& units) {
  if (k2_mags.size() < 3) throw FitFailure("gap_estimate: need at least 3 k2 magnitudes");
  GapEstimate out;
  const TorusGeometry& geom = field.geometry();
  const Vec3 lv = geom.lattice_vector(l);
  const Vec3 k1v = geom.lattice_vector(k1);
  const_cast<CoefficientField&>(field).ensure_range(
      lv.norm() + 4.0 * (*std::max_element(k2_mags.begin(), k2_mags.end())) + 2.0);

  // eigenvalues per k2, branch-tracked by nearest neighbour to the previous step
  std::vector<std::array<Complex, 4>> rows;
  for (double mag : k2_mags) {
    const Vec3 k2v{0.0, mag, 0.0};
    auto spec = eigenvalues(build_matrix(stats, field, lv, k1v, k2v, units));
    std::array<Complex, 4> vals = spec.lambda;
    if (!rows.empty()) {
      const auto& prev = rows.back();
      std::array<Complex, 4> matched;
      std::array<bool, 4> used{};
      for (int i = 0; i < 4; ++i) {
        double best = std::numeric_limits<double>::infinity();
        int pick = -1;
        for (int j = 0; j < 4; ++j) {
          if (used[j]) continue;
          const double d = std::abs(vals[j] - prev[i]);
          if (d < best) {
            best = d;
            pick = j;
          }
        }
        matched[i] = vals[pick];
        used[pick] = true;
      }
      vals = matched;
    }
    rows.push_back(vals);
  }

  out.min_abs_g = std::numeric_limits<double>::infinity();
  for (int branch = 0; branch < 4; ++branch) {
    GapBranch gb;
    std::vector<double> xs, ys;
    for (std::size_t j = 0; j < rows.size(); ++j) {
      xs.push_back(k2_mags[j]);
      ys.push_back(rows[j][branch].real());
      if (std::abs(rows[j][branch].imag()) >
          1e-10 * (std::abs(rows[j][branch]) + 1.0)) {
        gb.went_complex = true;
      }
    }
    const double powers[] = {0.0, 1.0, 2.0};
    auto quad = fit::fit_powers(xs, ys, powers);
    gb.intercept = quad.coeffs[0];
    gb.g = quad.coeffs[1];
    gb.r2 = fit::fit_line(xs, ys).r2;
    out.min_abs_g = std::min(out.min_abs_g, std::abs(gb.g));
    out.branches.push_back(gb);
  }
  return out;
}

std::array<Complex, 4> characteristic_polynomial(const Eigen::Matrix4cd& m) {
  using Matrix4cd = Eigen::Matrix4cd;
  const Matrix4cd I = Matrix4cd::Identity();
  Matrix4cd mk = m;
  const Complex c3 = -mk.trace();
  mk = m * (mk + c3 * I);
  const Complex c2 = -mk.trace() / 2.0;
  mk = m * (mk + c2 * I);
  const Complex c1 = -mk.trace() / 3.0;
  mk = m * (mk + c1 * I);
  const Complex c0 = -mk.trace() / 4.0;
  return {c0, c1, c2, c3};
}

std::array<Complex, 4> quartic_roots(const std::array<Complex, 4>& coeffs) {
  const auto eval = [&](Complex z) {
    return (((z + coeffs[3]) * z + coeffs[2]) * z + coeffs[1]) * z + coeffs[0];
  };
  double scale = 1.0;
  for (int k = 0; k < 4; ++k) {
    scale = std::max(scale, std::pow(std::abs(coeffs[k]), 1.0 / (4.0 - k)));
  }
  std::array<Complex, 4> z;
  const Complex seed{0.4, 0.9};
  z[0] = scale * seed;
  for (int i = 1; i < 4; ++i) z[i] = z[i - 1] * seed;

  for (int iter = 0; iter < 500; ++iter) {
    double moved = 0.0;
    for (int i = 0; i < 4; ++i) {
      Complex denom{1.0, 0.0};
      for (int j = 0; j < 4; ++j) {
        if (j != i) denom *= z[i] - z[j];
      }
      const Complex step = eval(z[i]) / denom;
      z[i] -= step;
      moved = std::max(moved, std::abs(step));
    }
    if (moved < 1e-15 * scale) break;
  }
  return z;
}

double multiset_distance(std::span<const Complex> a, std::span<const Complex> b) {
  std::array<int, 4> perm{0, 1, 2, 3};
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace exspec

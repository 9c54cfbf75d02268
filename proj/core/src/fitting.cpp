#include "exspec/fitting.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "exspec/errors.hpp"

namespace exspec::fit {

PolyFit fit_powers(std::span<const double> x, std::span<const double> y,
                   std::span<const double> powers) {
  const auto n = std::ssize(x);
  const auto m = std::ssize(powers);
  if (n < m) throw IllConditionedFit("fit_powers: fewer samples than basis functions");

  Eigen::MatrixXd A(n, m);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < m; ++k) A(i, k) = std::pow(x[i], powers[k]);
    b(i) = y[i];
  }
  Eigen::VectorXd scale(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    scale(k) = A.col(k).norm();
    if (scale(k) == 0.0) scale(k) = 1.0;
    A.col(k) /= scale(k);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double cond = svd.singularValues()(0) / svd.singularValues()(m - 1);
  Eigen::VectorXd c = svd.solve(b);

  PolyFit out;
  out.condition = cond;
  out.coeffs.resize(std::size_t(m));
  for (Eigen::Index k = 0; k < m; ++k) out.coeffs[std::size_t(k)] = c(k) / scale(k);

  Eigen::VectorXd resid = A * c - b;
  out.rms_residual = std::sqrt(resid.squaredNorm() / double(n));
  out.max_residual = resid.cwiseAbs().maxCoeff();
  return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const auto n = std::ssize(x);
  if (n < 2) throw IllConditionedFit("fit_line: need at least two samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  if (det == 0.0) throw IllConditionedFit("fit_line: degenerate abscissae");
  LineFit out;
  out.slope = (n * sxy - sx * sy) / det;
  out.intercept = (sy - out.slope * sx) / n;
  const double ss_tot = syy - sy * sy / n;
  double ss_res = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = y[i] - (out.slope * x[i] + out.intercept);
    ss_res += r * r;
  }
  out.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return out;
}

RichardsonResult richardson_limit(std::span<const double> samples, double ratio, int order) {
  RichardsonResult out;
  const auto n = std::ssize(samples);
  if (n < order + 2) throw IllConditionedFit("richardson_limit: ladder too short");

  // Divergence probe: |g| growing at a steady factor with substantial total
  // growth over the ladder.
  int grow = 0;
  for (Eigen::Index j = 0; j + 1 < n; ++j) {
    if (std::abs(samples[j + 1]) > 1.1 * std::abs(samples[j])) ++grow;
  }
  if (grow >= n - 2 && std::abs(samples[n - 1]) > 4.0 * std::abs(samples[0])) {
    out.diverged = true;
    out.value = samples[n - 1];
    out.error = std::abs(samples[n - 1]);
    return out;
  }

  std::vector<double> level(samples.begin(), samples.end());
  double prev_head = level.back();
  for (int k = 1; k <= order; ++k) {
    const double w = std::pow(ratio, double(k));
    for (std::size_t j = 0; j + 1 < level.size(); ++j) {
      level[j] = (w * level[j + 1] - level[j]) / (w - 1.0);
    }
    level.pop_back();
    prev_head = level.size() > 1 ? level[level.size() - 2] : prev_head;
  }
  out.value = level.back();
  out.error = std::abs(level.back() - prev_head);
  return out;
}

double golden_section_min(const std::function<double(double)>& f, double a, double b,
                          double tol) {
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace exspec::fit

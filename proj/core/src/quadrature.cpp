#include "exspec/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "exspec/errors.hpp"

namespace exspec::quad {

namespace {

// QUADPACK dqk15 nodes and weights on [-1, 1].
constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
constexpr double kWgk[8] = {
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278};
constexpr double kWg[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694};

// Euler transform of an alternating series given its signed terms:
// S = (1/2) sum_j avg^j(t)_0 with avg the neighbour-averaging operator.
double euler_sum(std::vector<double> t) {
  double series = 0.0;
  for (std::size_t level = 0; level < t.size(); ++level) {
    series += 0.5 * t[0];
    for (std::size_t i = 0; i + 1 + level < t.size(); ++i) {
      t[i] = 0.5 * (t[i] + t[i + 1]);
    }
  }
  return series;
}

}  // namespace

Result gauss_kronrod_15(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  double fc = f(mid);
  double kronrod = kWgk[7] * fc;
  double gauss = kWg[3] * fc;

  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double fsum = f(mid - dx) + f(mid + dx);
    kronrod += kWgk[j] * fsum;
    if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
  }
  kronrod *= half;
  gauss *= half;

  const double err = std::abs(kronrod - gauss) + 5e-17 * std::abs(kronrod);
  return {kronrod, err};
}

Result integrate_panels(const std::function<double(double)>& f, double a, double b,
                        const PanelSettings& settings) {
  if (!(b > a)) return {0.0, 0.0};
  double panel = std::min(settings.max_panel, b - a);
  Result total;
  for (int round = 0;; ++round) {
    const int n = std::max<int>(1, int(std::ceil((b - a) / panel)));
    const double h = (b - a) / n;
    total = {};
    for (int i = 0; i < n; ++i) {
      total += gauss_kronrod_15(f, a + i * h, a + (i + 1) * h);
    }
    if (total.error <= settings.tolerance) return total;
    if (round >= settings.max_refinements) break;
    panel *= 0.5;
  }
  throw QuadratureFailure("integrate_panels: error estimate " + std::to_string(total.error) +
                          " above tolerance " + std::to_string(settings.tolerance));
}

double power_tail_moment(double c, double alpha, double R) {
  if (c == 0.0) return 0.0;
  if (alpha <= 3.0) {
    throw NonIntegrableTail("power_tail_moment: tail exponent " + std::to_string(alpha) +
                            " <= 3, volume integral diverges");
  }
  return c * std::pow(R, 3.0 - alpha) / (alpha - 3.0);
}

Result sin_power_tail(double c, double alpha, double R, double p) {
  if (c == 0.0 || p == 0.0) return {0.0, 0.0};
  if (alpha <= 1.0) {
    throw NonIntegrableTail("sin_power_tail: tail exponent " + std::to_string(alpha) +
                            " <= 1, sine integral diverges");
  }
  const auto f = [c, alpha, p](double r) { return c * std::pow(r, -alpha) * std::sin(p * r); };

  Result total;

  // Stretch from R to the first zero of sin(p r): split geometrically (it can
  // span decades when p is small) while keeping each piece under a quarter
  // period.
  const double half_period = pi / p;
  std::int64_t j0 = std::int64_t(std::ceil(R * p / pi));
  if (j0 < 1) j0 = 1;
  const double first_zero = double(j0) * half_period;
  double lo = R;
  while (lo < first_zero - 1e-300) {
    double hi = std::min(first_zero, std::max(lo * 2.0, lo + half_period / 4.0));
    int parts = std::max<int>(1, int(std::ceil((hi - lo) / (half_period / 4.0))));
    parts = std::min(parts, 64);
    const double h = (hi - lo) / parts;
    for (int i = 0; i < parts; ++i) {
      total += gauss_kronrod_15(f, lo + i * h, lo + (i + 1) * h);
    }
    lo = hi;
  }

  // Half-period segments beyond the first zero form a strictly alternating
  // series with decreasing magnitudes: take a few directly, Euler-sum the rest.
  const int direct_terms = 12;
  double r = first_zero;
  for (int k = 0; k < direct_terms; ++k) {
    Result seg = gauss_kronrod_15(f, r, r + half_period);
    total += seg;
    r += half_period;
  }
  const int series_terms = 48;
  std::vector<double> terms;
  terms.reserve(series_terms);
  for (int k = 0; k < series_terms; ++k) {
    Result seg = gauss_kronrod_15(f, r, r + half_period);
    total.error += seg.error;
    terms.push_back(seg.value);
    r += half_period;
  }
  total.value += euler_sum(terms);
  total.error += std::abs(terms.back()) * 1e-9 + 1e-300;
  return total;
}

}  // namespace exspec::quad

#include <doctest.h>

#include <cmath>

#include "exspec/errors.hpp"
#include "exspec/fitting.hpp"
#include "exspec/quadrature.hpp"

using namespace exspec;

TEST_CASE("gauss-kronrod panel integrates smooth functions to near machine") {
  auto res = quad::gauss_kronrod_15([](double x) { return std::exp(-x * x); }, 0.0, 1.0);
  // erf(1) * sqrt(pi) / 2
  CHECK(res.value == doctest::Approx(0.7468241328124271).epsilon(1e-14));
  CHECK(res.error < 1e-10);
}

TEST_CASE("composite panels meet the requested tolerance or throw") {
  quad::PanelSettings ps;
  ps.max_panel = 0.5;
  ps.tolerance = 1e-12;
  auto res = quad::integrate_panels([](double x) { return std::sin(x); }, 0.0, pi, ps);
  CHECK(res.value == doctest::Approx(2.0).epsilon(1e-13));

  ps.max_refinements = 0;
  ps.max_panel = pi;
  ps.tolerance = 1e-16;
  CHECK_THROWS_AS(
      quad::integrate_panels([](double x) { return std::sin(50.0 * x) / (1e-3 + x); }, 0.0, pi, ps),
      QuadratureFailure);
}

TEST_CASE("power tail moment is the closed form") {
  // Int_2^inf 3 r^-5 r^2 dr = 3 * 2^-2 / 2
  CHECK(quad::power_tail_moment(3.0, 5.0, 2.0) == doctest::Approx(0.375).epsilon(1e-15));
  CHECK_THROWS_AS(quad::power_tail_moment(1.0, 2.5, 1.0), NonIntegrableTail);
  CHECK(quad::power_tail_moment(0.0, 2.0, 1.0) == 0.0);
}

TEST_CASE("oscillatory power tail matches sine-integral table values") {
  // Int_1^inf sin(r)/r^2 dr = sin(1) - Ci(1)
  auto a = quad::sin_power_tail(1.0, 2.0, 1.0, 1.0);
  CHECK(a.value == doctest::Approx(0.5040670619069284).epsilon(1e-12));

  // Int_0.5^inf sin(2r)/r^3 dr = 4 Int_1^inf sin(u)/u^3 du
  auto b = quad::sin_power_tail(1.0, 3.0, 0.5, 2.0);
  CHECK(b.value == doctest::Approx(1.5141200684966455).epsilon(1e-12));

  // small p: the first zero sits far beyond R
  // Int_1^inf sin(0.01 r)/r^3 dr via the same identity: 1e-4 * Int_0.01^inf sin(u)/u^3 du
  auto c = quad::sin_power_tail(1.0, 3.0, 1.0, 0.01);
  // IBP: Int_x^inf sin u/u^3 du = sin(x)/(2x^2) + cos(x)/(2x) - (1/2)(pi/2 - Si(x))
  const double x = 0.01;
  const double si_x = 0.0099999444444610667;  // Si(0.01)
  const double truth =
      1e-4 * (std::sin(x) / (2 * x * x) + std::cos(x) / (2 * x) - 0.5 * (pi / 2 - si_x));
  CHECK(c.value == doctest::Approx(truth).epsilon(1e-10));

  CHECK(quad::sin_power_tail(0.0, 3.0, 1.0, 1.0).value == 0.0);
  CHECK(quad::sin_power_tail(1.0, 3.0, 1.0, 0.0).value == 0.0);
  CHECK_THROWS_AS(quad::sin_power_tail(1.0, 0.5, 1.0, 1.0), NonIntegrableTail);
}

TEST_CASE("richardson ladder recovers limits and flags divergence") {
  // g(t) = 5 + 3/t + 7/t^2 sampled at t = 2^j
  std::vector<double> g;
  for (int j = 0; j < 8; ++j) {
    const double t = std::pow(2.0, j);
    g.push_back(5.0 + 3.0 / t + 7.0 / (t * t));
  }
  auto res = fit::richardson_limit(g, 2.0, 2);
  CHECK(res.value == doctest::Approx(5.0).epsilon(1e-10));
  CHECK_FALSE(res.diverged);

  std::vector<double> grow;
  for (int j = 0; j < 11; ++j) grow.push_back(std::sqrt(10.0) * std::pow(std::sqrt(2.0), j));
  CHECK(fit::richardson_limit(grow, 2.0, 2).diverged);
}

TEST_CASE("power fit recovers mixed exponents") {
  std::vector<double> x, y;
  for (int i = 1; i <= 40; ++i) {
    const double p = 0.01 * i;
    x.push_back(p);
    y.push_back(2.5 * p - 0.7 * p * p + 0.1 * p * p * p);
  }
  const double powers[] = {1.0, 2.0, 3.0};
  auto fit = fit::fit_powers(x, y, powers);
  CHECK(fit.coeffs[0] == doctest::Approx(2.5).epsilon(1e-10));
  CHECK(fit.coeffs[1] == doctest::Approx(-0.7).epsilon(1e-8));
  CHECK(fit.rms_residual < 1e-12);
}

TEST_CASE("golden section refines a quadratic minimum") {
  const double x =
      fit::golden_section_min([](double t) { return (t - 1.3) * (t - 1.3); }, 0.0, 3.0, 1e-10);
  CHECK(x == doctest::Approx(1.3).epsilon(1e-8));
}

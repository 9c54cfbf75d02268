#include <doctest.h>

#include <cmath>

#include "exspec/conventions.hpp"
#include "exspec/errors.hpp"
#include "exspec/potentials.hpp"

using namespace exspec;

namespace {

// analytic transforms under the convention Vt(p) = (4 pi / p) Int V r sin(pr) dr
double yukawa_vt(double p, double g, double mu) { return 4.0 * pi * g / (p * p + mu * mu); }
double gaussian_vt(double p) { return std::pow(pi, 1.5) * std::exp(-p * p / 4.0); }
// transform of -1/(r^4+1): contour integration gives
// -(2 pi^2 / p) e^{-p/sqrt2} sin(p/sqrt2), with limit -sqrt2 pi^2 at p = 0
double r4_vt(double p) {
  if (p == 0.0) return -std::sqrt(2.0) * pi * pi;
  const double x = p / std::sqrt(2.0);
  return -2.0 * pi * pi / p * std::exp(-x) * std::sin(x);
}

}  // namespace

TEST_CASE("forward transform matches the analytic Yukawa and Gaussian pairs") {
  TransformSettings ts;
  ts.tolerance = 1e-10;
  auto grid = uniform_grid(0.0, 10.0, 101);
  auto yuk = fourier_transform(make_yukawa(1.0, 1.0), grid, ts);
  auto gau = fourier_transform(make_gaussian(1.0, 1.0), grid, ts);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(yuk.values()[i] ==
          doctest::Approx(yukawa_vt(grid[i], 1.0, 1.0)).epsilon(1e-8));
    CHECK(gau.values()[i] == doctest::Approx(gaussian_vt(grid[i])).epsilon(1e-8));
  }
  // spot values from the spec of the convention
  CHECK(yuk.value(1.0) == doctest::Approx(2.0 * pi).epsilon(1e-7));
  CHECK(gau.at_zero() == doctest::Approx(std::pow(pi, 1.5)).epsilon(1e-9));
}

TEST_CASE("zero potential transforms to zero") {
  auto spec = fourier_transform(make_zero(), uniform_grid(0.0, 5.0, 21));
  for (double v : spec.values()) CHECK(v == 0.0);
}

TEST_CASE("r^-4 potential transform matches the contour-integral oracle") {
  TransformSettings ts;
  ts.tolerance = 1e-9;
  auto grid = uniform_grid(0.0, 6.0, 61);
  auto spec = fourier_transform(make_r4_tail(-1.0, 1.0), grid, ts);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(spec.values()[i] == doctest::Approx(r4_vt(grid[i])).epsilon(2e-6));
  }
}

TEST_CASE("transform accepts only magnitudes and is even by construction") {
  auto pot = make_gaussian(1.0, 1.0);
  const double plus = fourier_transform_at(pot, 1.25);
  const double minus = fourier_transform_at(pot, -1.25);
  CHECK(plus == minus);  // bitwise: |p| is taken before any arithmetic
}

TEST_CASE("inverse transform reproduces the examples") {
  TransformSettings ts;
  ts.tolerance = 1e-10;
  SUBCASE("gaussian at r = 1") {
    auto spec = fourier_transform(make_gaussian(1.0, 1.0), uniform_grid(0.0, 14.0, 281), ts);
    const double r_grid[] = {1.0};
    auto v = inverse_transform(spec, r_grid, ts);
    CHECK(v[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
  }
  SUBCASE("zero spectrum") {
    RadialSpectrum spec(uniform_grid(0.0, 5.0, 11), std::vector<double>(11, 0.0));
    const double r_grid[] = {0.5, 1.0};
    auto v = inverse_transform(spec, r_grid, ts);
    CHECK(v[0] == 0.0);
    CHECK(v[1] == 0.0);
  }
  SUBCASE("yukawa mu=2 at r = 0.5") {
    auto spec = fourier_transform(make_yukawa(1.0, 2.0), uniform_grid(0.0, 160.0, 3201), ts);
    const double r_grid[] = {0.5};
    auto v = inverse_transform(spec, r_grid, ts);
    CHECK(v[0] == doctest::Approx(std::exp(-1.0) / 0.5).epsilon(2e-4));
  }
  SUBCASE("undecayed spectrum is rejected") {
    auto spec = fourier_transform(make_yukawa(1.0, 1.0), uniform_grid(0.0, 4.0, 41), ts);
    const double r_grid[] = {1.0};
    CHECK_THROWS_AS(inverse_transform(spec, r_grid, ts), InsufficientSpectrum);
  }
}

TEST_CASE("round trip: forward then inverse within 1e-6 on [0.1, 5]") {
  TransformSettings ts;
  ts.tolerance = 1e-9;
  for (int which = 0; which < 2; ++which) {
    const RadialPotential pot = which == 0 ? make_gaussian(1.0, 1.0) : make_yukawa(1.0, 1.0);
    CAPTURE(pot.name);
    auto spec = fourier_transform(pot, uniform_grid(0.0, 14.0, 281), ts);
    auto r_grid = uniform_grid(0.1, 5.0, 50);
    auto back = inverse_transform(spec, r_grid, ts);
    double worst = 0.0;
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
      worst = std::max(worst, std::abs(back[i] - pot(r_grid[i])) / std::abs(pot(r_grid[i])));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("tail limit ladder") {
  SUBCASE("r^-4 tail converges to the coefficient") {
    auto lim = tail_limit_r4(make_r4_tail(-1.0, 1.0));
    CHECK(lim.value == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK_FALSE(lim.exact_zero);
  }
  SUBCASE("compact support is exactly zero") {
    auto lim = tail_limit_r4(make_bump(1.0, 1.0));
    CHECK(lim.value == 0.0);
    CHECK(lim.exact_zero);
  }
  SUBCASE("lennard-jones r^-6 tail vanishes with the decay flag") {
    auto lim = tail_limit_r4(make_lennard_jones(1.0, 1.0));
    CHECK(lim.value == 0.0);
    CHECK(lim.decay_exponent == 6.0);
  }
  SUBCASE("slower-than-r^-4 decay diverges") {
    RadialPotential bad;
    bad.profile = [](double r) { return std::pow(r, -3.5); };
    bad.tail_exponent = 3.5;
    bad.tail_coefficient = 1.0;
    bad.tail_start = 10.0;
    CHECK_THROWS_AS(tail_limit_r4(bad), DivergentTail);
  }
}

TEST_CASE("slope at zero distinguishes tails") {
  TransformSettings ts;
  ts.tolerance = 1e-10;
  auto grid = geometric_grid_with_zero(2e-3, 6e-2, 18);

  SUBCASE("compact support: even-analytic, slope vanishes") {
    auto spec = fourier_transform(make_bump(1.0, 1.0), grid, ts);
    auto fit = spectrum_slope_at_zero(spec, {.max_points = 18, .residual_band = 1e-3});
    CHECK(std::abs(fit.slope) < 1e-4 * std::abs(spec.at_zero()));
  }
  SUBCASE("r^-4 tail: slope is -kappa * lim r^4 V") {
    auto spec = fourier_transform(make_r4_tail(-1.0, 1.0), grid, ts);
    auto fit = spectrum_slope_at_zero(spec, {.max_points = 18, .residual_band = 1e-3});
    CHECK(fit.slope == doctest::Approx(conventions::kappa).epsilon(2e-3));
  }
  SUBCASE("yukawa: even-analytic in p^2, slope vanishes") {
    auto spec = fourier_transform(make_yukawa(1.0, 1.0), grid, ts);
    auto fit = spectrum_slope_at_zero(spec, {.max_points = 18, .residual_band = 1e-3});
    CHECK(std::abs(fit.slope) < 1e-4 * std::abs(spec.at_zero()));
  }
  SUBCASE("too sparse a grid is rejected") {
    auto spec = fourier_transform(make_gaussian(1.0, 1.0), uniform_grid(0.0, 1.0, 3));
    CHECK_THROWS_AS(spectrum_slope_at_zero(spec), IllConditionedFit);
  }
}

TEST_CASE("kappa calibration: brute-force small-p quadrature fixes the constant") {
  TransformSettings ts;
  ts.tolerance = 1e-11;
  const auto pot = make_r4_tail(-1.0, 1.0);
  const double vt0 = fourier_transform_at(pot, 0.0, ts);
  const double s1 = (fourier_transform_at(pot, 1e-3, ts) - vt0) / 1e-3;
  const double s2 = (fourier_transform_at(pot, 5e-4, ts) - vt0) / 5e-4;
  const double slope = 2.0 * s2 - s1;
  // lim r^4 V = -1, so slope = -kappa * (-1) = kappa
  CHECK(slope == doctest::Approx(conventions::kappa).epsilon(1e-5));
}

TEST_CASE("general-position theorem report") {
  SUBCASE("screened core with r^-4 tail satisfies the proportionality") {
    auto pot = compose_sum(make_yukawa(1.0, 1.0), make_r4_tail(-1.0, 1.0));
    auto rep = verify_general_position(pot);
    CHECK(rep.hypothesis_met);
    CHECK(rep.lim_p2_vtilde == doctest::Approx(4.0 * pi).epsilon(1e-3));
    CHECK(rep.lim_r4_v == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(rep.proportionality_pass);
    CHECK(std::abs(rep.proportionality_ratio - 1.0) < 0.02);
    CHECK(rep.sign_check);  // attractive tail: positive sound coefficient
  }
  SUBCASE("gaussian: hypotheses unmet, all limits vanish") {
    auto rep = verify_general_position(make_gaussian(1.0, 1.0));
    CHECK_FALSE(rep.hypothesis_met);
    CHECK(std::abs(rep.lim_p2_vtilde) < 1e-6);
    CHECK(rep.lim_r4_v == 0.0);
    CHECK(rep.proportionality_pass);  // zero-slope control branch
  }
  SUBCASE("yukawa: 1/r core, no power tail") {
    auto rep = verify_general_position(make_yukawa(1.0, 1.0));
    CHECK(rep.hypothesis_met);
    CHECK(rep.lim_p2_vtilde == doctest::Approx(4.0 * pi).epsilon(1e-4));
    CHECK(rep.lim_r4_v == 0.0);
    CHECK(rep.proportionality_pass);
  }
}

TEST_CASE("monotone tail: p^2 Vt approaches 4 pi times the core strength") {
  auto pot = compose_sum(make_yukawa(1.0, 1.0), make_r4_tail(-1.0, 1.0));
  TransformSettings ts;
  ts.tolerance = 1e-10;
  double prev = std::numeric_limits<double>::infinity();
  for (double p : {10.0, 20.0, 40.0, 80.0}) {
    const double dev = std::abs(p * p * fourier_transform_at(pot, p, ts) - 4.0 * pi);
    CHECK(dev < prev);
    prev = dev;
  }
}

TEST_CASE("nonanalytic exponent separates r^-4 from r^-6 tails") {
  TransformSettings ts;
  ts.tolerance = 1e-10;
  auto grid = geometric_grid_with_zero(1e-3, 0.6, 40);

  auto r4 = nonanalytic_exponent(fourier_transform(make_r4_tail(-1.0, 1.0), grid, ts));
  CHECK(r4.detected);
  CHECK(r4.beta == doctest::Approx(1.0).epsilon(0.15));

  auto lj = nonanalytic_exponent(fourier_transform(make_lennard_jones(1.0, 1.0), grid, ts));
  CHECK(lj.detected);
  CHECK(lj.beta == doctest::Approx(3.0).epsilon(0.1));

  auto bump = nonanalytic_exponent(fourier_transform(make_bump(1.0, 1.0), grid, ts));
  CHECK_FALSE(bump.detected);
}

TEST_CASE("attractive-tail sign convention") {
  CHECK(conventions::sound_coefficient(-1.0) > 0.0);
  CHECK(conventions::sound_coefficient(+1.0) < 0.0);
}

TEST_CASE("integrability guards") {
  SUBCASE("tail exponent <= 3 with a nonzero coefficient") {
    RadialPotential bad = make_r4_tail(-1.0, 1.0);
    bad.tail_exponent = 3.0;
    CHECK_THROWS_AS(fourier_transform_at(bad, 1.0), NonIntegrableTail);
  }
  SUBCASE("core diverging faster than 1/r^2") {
    RadialPotential bad;
    bad.profile = [](double r) { return std::pow(r, -3.0); };
    bad.tail_exponent = 4.0;
    bad.tail_coefficient = 0.0;
    bad.tail_start = 5.0;
    auto grid = uniform_grid(0.0, 2.0, 11);
    CHECK_THROWS_AS(fourier_transform(bad, grid, {}), NonIntegrableCore);
  }
}

TEST_CASE("spectrum interpolation contract") {
  auto spec = fourier_transform(make_gaussian(1.0, 1.0), uniform_grid(0.0, 8.0, 161));
  // deterministic between-sample evaluation, close to the analytic value
  CHECK(spec.value(1.2345) == doctest::Approx(gaussian_vt(1.2345)).epsilon(1e-7));
  CHECK(spec.value(1.2345) == spec.value(1.2345));
  CHECK_THROWS_AS(spec.value(9.0), SpectrumRangeExceeded);
  CHECK_THROWS_AS(RadialSpectrum(uniform_grid(1.0, 2.0, 5), std::vector<double>(5, 0.0)),
                  InvalidInput);
}

TEST_CASE("table potential round trip through the interpolant") {
  auto src = make_gaussian(1.0, 1.0);
  std::vector<double> rs, vs;
  for (int i = 0; i <= 400; ++i) {
    rs.push_back(8.0 * i / 400.0 + 1e-3);
    vs.push_back(src(rs.back()));
  }
  auto tab = make_table(std::move(rs), std::move(vs));
  CHECK(tab(1.0) == doctest::Approx(src(1.0)).epsilon(1e-8));
  CHECK(tab(9.0) == 0.0);  // beyond the table with no tail coefficient
  CHECK_THROWS_AS(make_table({1.0, 0.5}, {0.0, 0.0}), InvalidInput);
}

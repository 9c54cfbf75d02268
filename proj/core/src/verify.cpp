#include "exspec/verify.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "exspec/conventions.hpp"
#include "exspec/dispersion.hpp"
#include "exspec/errors.hpp"
#include "exspec/io.hpp"
#include "exspec/pairfield.hpp"
#include "exspec/torus.hpp"
#include "exspec/variational.hpp"

namespace exspec::verify {

RadialPotential reference_fermi_potential() {
  return compose_sum(make_gaussian(3.4, 1.0), make_r4_tail(-1.0, 1.0));
}

RadialPotential reference_theorem_potential() {
  return compose_sum(make_yukawa(1.0, 1.0), make_r4_tail(-1.0, 1.0));
}

RadialPotential reference_bump_potential() { return make_bump(1e-4, 1.0); }

void parallel_for(int count, int workers, const std::function<void(int)>& task) {
  if (workers <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int n_threads = std::min(workers, count);
  pool.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) task(i);
    });
  }
  for (auto& th : pool) th.join();
}

namespace {

std::string detail_value(const std::string& label, double value) {
  return label + "=" + io::format_double(value);
}

void add_check(SuiteResult& suite, const std::string& name, bool pass,
               const std::string& detail) {
  suite.checks.push_back({suite.name + "." + name, pass, detail});
  suite.pass = suite.pass && pass;
}

// ---------------- potentials ----------------

SuiteResult suite_potentials(const VerifyOptions&) {
  SuiteResult suite;
  suite.name = "potentials";

  {
    // round trip, gaussian and yukawa
    double worst = 0.0;
    TransformSettings ts;
    ts.tolerance = 1e-9;
    for (int which = 0; which < 2; ++which) {
      const RadialPotential pot = which == 0 ? make_gaussian(1.0, 1.0) : make_yukawa(1.0, 1.0);
      auto spec = fourier_transform(pot, uniform_grid(0.0, 14.0, 281), ts);
      auto r_grid = uniform_grid(0.1, 5.0, 25);
      auto back = inverse_transform(spec, r_grid, ts);
      for (std::size_t i = 0; i < r_grid.size(); ++i) {
        const double truth = pot(r_grid[i]);
        worst = std::max(worst, std::abs(back[i] - truth) / std::abs(truth));
      }
    }
    add_check(suite, "round_trip", worst < 1e-6, detail_value("max_rel_err", worst));
  }
  {
    // analytic transform oracles
    double worst = 0.0;
    TransformSettings ts;
    ts.tolerance = 1e-10;
    auto grid = uniform_grid(0.0, 10.0, 101);
    auto yuk = fourier_transform(make_yukawa(1.0, 1.0), grid, ts);
    auto gau = fourier_transform(make_gaussian(1.0, 1.0), grid, ts);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double p = grid[i];
      const double yuk_truth = 4.0 * pi / (p * p + 1.0);
      const double gau_truth = std::pow(pi, 1.5) * std::exp(-p * p / 4.0);
      worst = std::max(worst, std::abs(yuk.values()[i] - yuk_truth) / yuk_truth);
      worst = std::max(worst, std::abs(gau.values()[i] - gau_truth) / gau_truth);
    }
    add_check(suite, "analytic_oracles", worst < 1e-7, detail_value("max_rel_err", worst));
  }
  {
    // kappa calibration against the brute-force slope of -1/(r^4+1)
    const RadialPotential r4 = make_r4_tail(-1.0, 1.0);
    TransformSettings ts;
    ts.tolerance = 1e-10;
    const double vt0 = fourier_transform_at(r4, 0.0, ts);
    const double p1 = 1e-3, p2 = 5e-4;
    const double s1 = (fourier_transform_at(r4, p1, ts) - vt0) / p1;
    const double s2 = (fourier_transform_at(r4, p2, ts) - vt0) / p2;
    const double slope = 2.0 * s2 - s1;  // kills the p^2 term
    const double kappa_measured = slope / 1.0;  // lim r^4 V = -1, slope = -kappa * (-1)
    const bool pass = std::abs(kappa_measured - conventions::kappa) <
                      0.02 * conventions::kappa;
    add_check(suite, "kappa_calibration", pass, detail_value("kappa", kappa_measured));
  }
  {
    // tail-asymptotics theorem on the composite, with a compact control
    auto rep = verify_general_position(reference_theorem_potential());
    add_check(suite, "theorem_composite",
              rep.proportionality_pass && rep.hypothesis_met && rep.sign_check,
              detail_value("ratio", rep.proportionality_ratio));
    auto ctrl = verify_general_position(make_bump(1.0, 1.0));
    add_check(suite, "theorem_compact_control", ctrl.proportionality_pass && !ctrl.hypothesis_met,
              detail_value("slope", ctrl.slope_at_zero));
  }
  {
    // nonanalytic exponents: r^-4 tail vs regularized Lennard-Jones
    TransformSettings ts;
    ts.tolerance = 1e-10;
    auto grid = geometric_grid_with_zero(1e-3, 0.6, 40);
    auto r4_fit = nonanalytic_exponent(fourier_transform(make_r4_tail(-1.0, 1.0), grid, ts));
    auto lj_fit =
        nonanalytic_exponent(fourier_transform(make_lennard_jones(1.0, 1.0), grid, ts));
    const bool pass_r4 = r4_fit.detected && std::abs(r4_fit.beta - 1.0) <= 0.15;
    const bool pass_lj = lj_fit.detected && std::abs(lj_fit.beta - 3.0) <= 0.3;
    add_check(suite, "nonanalytic_r4", pass_r4, detail_value("beta", r4_fit.beta));
    add_check(suite, "nonanalytic_lj", pass_lj, detail_value("beta", lj_fit.beta));
  }
  return suite;
}

// ---------------- torus ----------------

SuiteResult suite_torus(const VerifyOptions&) {
  SuiteResult suite;
  suite.name = "torus";
  const TorusGeometry geom{2.0 * pi, 2.0 * pi, 1e6};

  {
    CoefficientField field(geom, make_bump(1.0, 1.0), 6.0);
    double worst_sym = 0.0;
    double worst_bound = 0.0;
    for (int i = -3; i <= 3; ++i)
      for (int j = -3; j <= 3; ++j)
        for (int k = -3; k <= 3; ++k) {
          const double v = field.at_index({i, j, k});
          const double w = field.at_index({-i, -j, -k});
          worst_sym = std::max(worst_sym, std::abs(v - w));
          worst_bound = std::max(worst_bound, std::abs(v) - field.bound());
        }
    add_check(suite, "symmetry", worst_sym == 0.0, detail_value("max_asym", worst_sym));
    add_check(suite, "bound", worst_bound <= 1e-12, detail_value("excess", worst_bound));

    const double v00 = field.at_index({0, 0, 0});
    const double v0 = v0_limit(make_bump(1.0, 1.0), geom);
    add_check(suite, "v0_exact", std::abs(v00 - v0) <= 1e-9 * std::abs(v0) + 1e-15,
              detail_value("diff", v00 - v0));
  }
  {
    CoefficientField field(geom, make_gaussian(1.0, 1.0), 6.0);
    const double v = field.at_index({1, 0, 0});
    const double continuum =
        fourier_transform_at(make_gaussian(1.0, 1.0), 1.0 / geom.cbrt_n()) / geom.volume();
    const double rel = std::abs(v - continuum) / std::abs(continuum);
    add_check(suite, "continuum_approximation", rel < 1e-4, detail_value("rel", rel));
  }
  return suite;
}

// ---------------- pairfield ----------------

SuiteResult suite_pairfield(const VerifyOptions& options) {
  SuiteResult suite;
  suite.name = "pairfield";
  const TorusGeometry geom{2.0 * pi, 2.0 * pi, 1e6};
  CoefficientField field(geom, reference_bump_potential(), 8.0);

  {
    const Vec3i k1s[] = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
    const Vec3i k2s[] = {{0, 1, 0}, {0, 1, 1}, {0, 2, 1}};
    double worst_resid = 0.0, worst_norm = 0.0;
    bool corrupted_detected = false;
    for (Statistics stats : {Statistics::bose, Statistics::fermi}) {
      for (const Vec3i& k1 : k1s) {
        for (const Vec3i& k2 : k2s) {
          PairFieldOptions opt;
          opt.units = options.units;
          auto sol = solve_pairfield(stats, field, k1, k2, opt);
          if (options.inject_phi_corruption && stats == Statistics::bose &&
              k1 == Vec3i{0, 0, 0} && k2 == Vec3i{0, 1, 0}) {
            sol.scale_phi({0, 2, 1}, 2.0);
          }
          auto rep = hamiltonian_residual(sol);
          const double rel =
              std::max(rep.sup_residual_first, rep.sup_residual_second) /
              std::abs(sol.omega());
          worst_resid = std::max(worst_resid, rel);
          worst_norm = std::max(worst_norm, std::abs(rep.normalization_magnitude - 0.5));
          if (rel > 1e-8) corrupted_detected = true;
        }
      }
    }
    add_check(suite, "hamiltonian_residual", worst_resid <= 1e-8,
              detail_value("max_rel_residual", worst_resid) +
                  (corrupted_detected ? " (corruption detected)" : ""));
    add_check(suite, "normalization", worst_norm <= 1e-12,
              detail_value("max_norm_dev", worst_norm));
  }
  {
    // Eq-41 branch route vs the closed form, random parameter triples
    std::mt19937_64 rng(0x5eedULL);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    std::uniform_real_distribution<double> vpos(0.05, 5.0);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      const Vec3 k2{0.0, unif(rng), unif(rng)};
      const Vec3 l{unif(rng), unif(rng), unif(rng)};
      const double V0 = vpos(rng);
      const auto lim = limiting_coefficients(k2, l, V0, options.units);
      const Complex root = std::sqrt(Complex(lim.b0 * lim.b0 - 1.0, 0.0));
      const Complex plus = -0.5 * lim.b0 + 0.5 * root;
      const Complex minus = -0.5 * lim.b0 - 0.5 * root;
      const double dev = std::min(std::abs(lim.phi0 - plus), std::abs(lim.phi0 - minus));
      worst = std::max(worst, dev / std::max(1.0, std::abs(lim.phi0)));
    }
    add_check(suite, "limiting_identity", worst <= 1e-12, detail_value("max_dev", worst));
  }
  {
    // leading-energy formula and the symbol-functional consistency
    PairFieldOptions opt;
    opt.units = options.units;
    auto sol = solve_pairfield(Statistics::bose, field, {0, 0, 0}, {0, 1, 0}, opt);
    const double V0 = v0_limit(reference_bump_potential(), geom);
    auto energy = energy_leading(sol, V0);
    const bool pass = std::abs(energy.deviation_per_particle) < 1e-8 &&
                      std::abs(energy.symbol_value.imag()) < 1e-14;
    add_check(suite, "energy_symbol", pass,
              detail_value("dev_per_particle", energy.deviation_per_particle));
  }
  return suite;
}

// ---------------- variational ----------------

SuiteResult suite_variational(const VerifyOptions& options) {
  SuiteResult suite;
  suite.name = "variational";
  const TorusGeometry geom{2.0 * pi, 2.0 * pi, 1e6};

  {
    // dense eigensolve vs the quartic characteristic-polynomial oracle
    const int count = 1000;
    std::vector<double> devs(count);
    parallel_for(count, options.workers, [&](int i) {
      std::mt19937_64 rng(0xC0FFEEULL + std::uint64_t(i));
      std::uniform_real_distribution<double> unif(-1.0, 1.0);
      Eigen::Matrix4cd m;
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) m(r, c) = Complex(unif(rng), unif(rng));
      VariationalBlock blk;
      blk.M = m;
      auto spec = eigenvalues(blk);
      auto roots = quartic_roots(characteristic_polynomial(m));
      double scale = 1.0;
      for (const auto& v : spec.lambda_tilde) scale = std::max(scale, std::abs(v));
      devs[i] = multiset_distance(spec.lambda_tilde, roots) / scale;
    });
    const double worst = *std::max_element(devs.begin(), devs.end());
    add_check(suite, "eigensolve_oracle", worst <= 1e-9, detail_value("max_rel_dev", worst));
  }
  {
    // zero potential: exact diagonal spectrum and exact closed form
    CoefficientField field(geom, make_zero(), 6.0);
    auto blk = build_matrix(Statistics::bose, field, Vec3i{0, 3, 0}, Vec3i{1, 0, 0},
                            Vec3i{0, 1, 0}, options.units);
    auto spec = eigenvalues(blk);
    const double a = options.units.kinetic_half();
    const Vec3 l = blk.l, k2 = blk.k2, l1 = blk.l + blk.k2 * 2.0;
    const std::array<Complex, 4> expect = {
        Complex(a * (l.norm2() - k2.norm2()), 0), Complex(-a * (l.norm2() - k2.norm2()), 0),
        Complex(a * (l1.norm2() - k2.norm2()), 0), Complex(-a * (l1.norm2() - k2.norm2()), 0)};
    const double dev = multiset_distance(spec.lambda_tilde, expect);
    auto closed = closed_form_bose(l, blk.k1, k2, a, blk.V_l, blk.V_l_plus);
    std::array<Complex, 4> closed_tilde;
    const double shift = options.units.kinetic_full() * blk.k1.dot(k2 + l);
    for (int i = 0; i < 4; ++i) closed_tilde[i] = closed[i] + shift;
    const double dev_closed = multiset_distance(closed_tilde, expect);
    add_check(suite, "zero_potential_exact", dev <= 1e-12 && dev_closed <= 1e-12,
              detail_value("dev", std::max(dev, dev_closed)));
  }
  {
    // closed-form comparison report on the reference bump
    CoefficientField field(geom, make_bump(0.5, 1.0), 8.0);
    double worst_a = 0.0, worst_b = 0.0;
    int rows = 0;
    for (int n = 1; n <= 3; ++n) {
      auto blk = build_matrix(Statistics::bose, field, Vec3i{0, n, 1}, Vec3i{1, 0, 0},
                              Vec3i{0, 1, 0}, options.units);
      auto spec = eigenvalues(blk);
      const double shift = options.units.kinetic_full() * blk.k1.dot(blk.k2 + blk.l);
      auto a_vals = closed_form_bose(blk.l, blk.k1, blk.k2, options.units.kinetic_half(),
                                     blk.V_l, blk.V_l_plus);
      const Vec3 l1 = blk.l + blk.k2 * 2.0;
      const double v_l1 = 0.5 * (field.at_vector(l1 - blk.k2) + field.at_vector(l1 + blk.k2));
      const double v_l1_plus =
          0.5 * (field.at_vector(l1 + blk.k2) + field.at_vector(blk.k2 * 2.0));
      auto b_vals = closed_form_bose_alt(blk.l, blk.k1, blk.k2, options.units.kinetic_half(),
                                         blk.V_l, blk.V_l_plus, v_l1, v_l1_plus);
      std::array<Complex, 4> at, bt;
      for (int i = 0; i < 4; ++i) {
        at[i] = a_vals[i] + shift;
        bt[i] = b_vals[i] + shift;
      }
      worst_a = std::max(worst_a, multiset_distance(spec.lambda_tilde, at));
      worst_b = std::max(worst_b, multiset_distance(spec.lambda_tilde, bt));
      ++rows;
    }
    // pass = the report exists; agreement is documented, not assumed
    add_check(suite, "closed_form_report", rows == 3,
              detail_value("dist_reading_A", worst_a) + " " +
                  detail_value("dist_reading_B", worst_b));
  }
  {
    // k2 -> 0 limit recovery toward the printed branch formulas
    CoefficientField field(geom, make_bump(0.5, 1.0), 8.0);
    for (Statistics stats : {Statistics::bose, Statistics::fermi}) {
      auto rep =
          limit_consistency(stats, field, Vec3i{0, 3, 0}, Vec3i{0, 0, 0}, 6, options.units);
      const Vec3 l = geom.lattice_vector(0, 3, 0);
      const double scale =
          options.units.kinetic_half() * l.norm2() + std::abs(field.at_vector(l));
      const bool pass = rep.exact_zero ||
                        (rep.fitted_order >= 0.9 && rep.terminal_deviation < 1e-3 * scale);
      add_check(suite, std::string("limit_recovery_") + to_string(stats), pass,
                detail_value("order", rep.fitted_order) + " " +
                    detail_value("terminal", rep.terminal_deviation));
    }
  }
  return suite;
}

// ---------------- dispersion ----------------

SuiteResult suite_dispersion(const VerifyOptions& options) {
  SuiteResult suite;
  suite.name = "dispersion";

  TransformSettings ts;
  ts.tolerance = 1e-9;
  const RadialPotential ref = reference_fermi_potential();
  auto spec = fourier_transform(ref, uniform_grid(0.0, 8.0, 400), ts);

  {
    // pointwise identity with the variational k2 = 0 fermionic branch
    double worst = 0.0;
    for (int i = 1; i <= 200; ++i) {
      const double p = 8.0 * i / 200.0;
      const double eps = epsilon_fermi(p, spec, options.units);
      const auto [l1, l2] = fermi_limit(p, 0.0, spec.value(p), spec.at_zero(), options.units);
      worst = std::max(worst, std::abs(eps - l2));
    }
    add_check(suite, "fermi_crosscheck", worst == 0.0, detail_value("max_dev", worst));
  }
  {
    auto curve = sample_curve(Statistics::fermi, spec, uniform_grid(0.0, 6.0, 600), {0, 0, 0},
                              {1, 0, 0}, options.units);
    auto features = landau_features(curve, spec, ref);
    const bool shape = features.maxon && features.roton && features.n_maxima == 1 &&
                       features.n_minima == 1 && features.maxon->p < features.roton->p &&
                       features.maxon->eps > features.roton->eps;
    add_check(suite, "landau_shape", shape,
              features.maxon && features.roton
                  ? detail_value("maxon_p", features.maxon->p) + " " +
                        detail_value("roton_p", features.roton->p)
                  : std::string("features missing"));
    const bool slope_ok = features.has_prediction &&
                          std::abs(features.slope_ratio - 1.0) < 0.02;
    add_check(suite, "sound_slope_prediction", slope_ok,
              detail_value("ratio", features.slope_ratio));
  }
  {
    // optimizer vs dense scan for randomized potentials
    const int count = 20;
    std::vector<int> ok(count, 0);
    std::vector<double> gap(count, 0.0);
    parallel_for(count, options.workers, [&](int i) {
      std::mt19937_64 rng(0xFACADEULL + std::uint64_t(i));
      std::uniform_real_distribution<double> amp(0.5, 4.0);
      std::uniform_real_distribution<double> wid(0.7, 1.6);
      std::uniform_real_distribution<double> tail(-2.0, -0.3);
      std::uniform_real_distribution<double> r0(0.8, 1.5);
      auto pot = compose_sum(make_gaussian(amp(rng), wid(rng)), make_r4_tail(tail(rng), r0(rng)));
      TransformSettings local;
      local.tolerance = 1e-8;
      auto sp = fourier_transform(pot, uniform_grid(0.0, 6.0, 300), local);
      const Units& u = options.units;
      const double opt_val = critical_velocity_continuum(sp, 0.0, 6.0, 512, u);
      // brute force at 10x the optimizer density
      const double vt0 = sp.at_zero();
      double brute = std::numeric_limits<double>::infinity();
      int best_j = 1;
      const int dense = 5120;
      for (int j = 1; j <= dense; ++j) {
        const double p = 6.0 * j / dense;
        const double f = std::abs((sp.value(p) - vt0) / p + u.kinetic_half() * p);
        if (f < brute) {
          brute = f;
          best_j = j;
        }
      }
      brute *= u.mass / (u.hbar * u.hbar);
      // one-grid-cell agreement: the objective's span over the winning cell
      const double h = 6.0 / dense;
      const double p_lo = std::max(h, best_j * h - h), p_hi = std::min(6.0, best_j * h + h);
      const double f_lo =
          std::abs((sp.value(p_lo) - vt0) / p_lo + u.kinetic_half() * p_lo) * u.mass /
          (u.hbar * u.hbar);
      const double f_hi =
          std::abs((sp.value(p_hi) - vt0) / p_hi + u.kinetic_half() * p_hi) * u.mass /
          (u.hbar * u.hbar);
      const double span = std::max(std::abs(f_lo - brute), std::abs(f_hi - brute)) + 1e-12;
      gap[i] = std::abs(opt_val - brute);
      ok[i] = (opt_val <= brute + 1e-12 || gap[i] <= span) ? 1 : 0;
    });
    bool all = true;
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
      all = all && ok[i] == 1;
      worst = std::max(worst, gap[i]);
    }
    add_check(suite, "critical_velocity_oracle", all, detail_value("max_gap", worst));
  }
  {
    // free-gas lattice criterion
    const TorusGeometry geom{2.0 * pi, 2.0 * pi, 1e6};
    CoefficientField field(geom, make_zero(), 4.0);
    const double v = critical_velocity_lattice(field, 2, options.units);
    add_check(suite, "free_gas_lattice", v == 0.5, detail_value("value", v));
  }
  {
    // drift linearity
    double worst = 0.0;
    const Vec3 v1{0.3, -0.2, 0.1}, v2{-0.1, 0.4, 0.25};
    for (double pmag : {0.5, 1.5, 3.0}) {
      const Vec3 p{pmag, 0.2, -0.4};
      const double lhs = lambda_full(p, v1 + v2, Statistics::fermi, spec, options.units).value -
                         lambda_full(p, v1, Statistics::fermi, spec, options.units).value;
      const double rhs =
          -options.units.hbar * options.units.hbar * p.dot(v2);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    add_check(suite, "drift_linearity", worst <= 1e-12, detail_value("max_dev", worst));
  }
  return suite;
}

}  // namespace

VerifySummary run_verification(const VerifyOptions& options) {
  VerifySummary summary;
  const auto want = [&](const char* name) {
    return options.suite.empty() || options.suite == name;
  };
  if (want("potentials")) summary.suites.push_back(suite_potentials(options));
  if (want("torus")) summary.suites.push_back(suite_torus(options));
  if (want("pairfield")) summary.suites.push_back(suite_pairfield(options));
  if (want("variational")) summary.suites.push_back(suite_variational(options));
  if (want("dispersion")) summary.suites.push_back(suite_dispersion(options));
  if (summary.suites.empty()) {
    throw InvalidInput("unknown suite '" + options.suite +
                       "' (potentials|torus|pairfield|variational|dispersion)");
  }
  for (const auto& s : summary.suites) summary.pass = summary.pass && s.pass;
  return summary;
}

nlohmann::json summary_json(const VerifySummary& summary, const std::string& config_digest) {
  nlohmann::json j;
  j["pass"] = summary.pass;
  nlohmann::json suites = nlohmann::json::object();
  for (const auto& s : summary.suites) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : s.checks) {
      checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    }
    suites[s.name] = {{"pass", s.pass}, {"checks", checks}};
  }
  j["suites"] = suites;
  io::stamp_meta(j, config_digest);
  return j;
}

}  // namespace exspec::verify

#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "exspec/common.hpp"
#include "exspec/potentials.hpp"

namespace exspec::verify {

/// Bundled reference potentials used by the verification suites and the CLI
/// examples. The fermi reference has a repulsive short-range core and an
/// attractive r^-4 tail, which produces a Landau-shaped curve with one maxon
/// and one roton.
RadialPotential reference_fermi_potential();   // 3.4 e^{-r^2} - 1/(r^4+1)
RadialPotential reference_theorem_potential(); // e^{-r}/r - 1/(r^4+1)
/// Weak compact bump: adaptive pair-field truncation stays small.
RadialPotential reference_bump_potential();

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SuiteResult {
  std::string name;
  bool pass = true;
  std::vector<CheckResult> checks;
};

struct VerifySummary {
  bool pass = true;
  std::vector<SuiteResult> suites;
};

struct VerifyOptions {
  int workers = 1;
  std::string suite;              // empty = all; otherwise one module suite
  bool inject_phi_corruption = false;  // fault-injection hook for testing
  Units units;
};

/// Runs the cross-module invariant suites: transform round trips,
/// Hamiltonian-system residuals, limiting-coefficient identities, eigensolve
/// oracle, limit recovery, closed-form comparison, and the critical-velocity
/// scan oracle. Deterministic for fixed options, independent of workers.
VerifySummary run_verification(const VerifyOptions& options = {});

nlohmann::json summary_json(const VerifySummary& summary, const std::string& config_digest);

/// Indexed parallel map with a bounded worker pool; every task writes only
/// its own slot, so results are identical for any worker count.
void parallel_for(int count, int workers, const std::function<void(int)>& task);

}  // namespace exspec::verify

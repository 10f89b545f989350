#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace helmdual {

struct CheckResult {
  int criterion = 0;  // 0 for supplementary checks
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  double limit_seconds = 0.0;  // 0 means no runtime limit
  std::string detail;
};

struct SelftestOptions {
  std::uint64_t seed = 1;
  // Runs the heavy solver, comparison and far-field suites.
  bool include_heavy = true;
  // Overall runtime limit for the full suite.
  double total_limit_seconds = 1200.0;
};

using CheckSink = std::function<void(const CheckResult&)>;

CheckResult check_operator_exactness(std::uint64_t seed);
CheckResult check_k_symmetry(std::uint64_t seed);
CheckResult check_gradient(std::uint64_t seed);
CheckResult check_fibering(std::uint64_t seed);
CheckResult check_reverse_holder(std::uint64_t seed);
// Criteria 6 (solver run), 7 (primal consistency), 8 (Palais-Smale bound).
std::vector<CheckResult> check_solver_run(std::uint64_t seed);
CheckResult check_asymptotic(std::uint64_t seed);
CheckResult check_farfield(std::uint64_t seed);
// Field file and config round trips.
CheckResult check_io(std::uint64_t seed);

// Runs every suite, reporting each result to `sink` as it finishes, and ends
// with criterion 11 (all passed within the overall limit).
std::vector<CheckResult> run_selftest(const SelftestOptions& opt, const CheckSink& sink = {});

}  // namespace helmdual

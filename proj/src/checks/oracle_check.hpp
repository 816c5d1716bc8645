#pragma once

#include <cstdint>
#include <vector>

namespace trustpcl::checks {

struct OracleCheckRow {
  std::uint64_t seed = 0;
  int num_states = 0;
  int num_actions = 0;
  double max_residual = 0.0;   // over the (tau, lambda) settings
  double max_violation = 0.0;  // over settings and d = 1..d_max
  bool converged = true;
};

struct OracleCheckOptions {
  int d_max = 5;
  double residual_threshold = 1e-10;
  double violation_threshold = 1e-8;
  /// Test hook: perturbs V* of the first MDP after solving.
  bool corrupt_first = false;
};

struct OracleCheckReport {
  std::vector<OracleCheckRow> rows;
  double overall_max_violation = 0.0;
  bool passed = true;
};

/// Solves every corpus MDP under each (tau, lambda) setting and measures the
/// multi-step consistency violation of the solution.
OracleCheckReport run_oracle_check(const std::vector<std::uint64_t>& seeds, const OracleCheckOptions& options = {});

}  // namespace trustpcl::checks

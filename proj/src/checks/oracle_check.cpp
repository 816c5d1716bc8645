#include "checks/oracle_check.hpp"

#include <algorithm>

#include "common/error.hpp"
#include "oracle/corpus.hpp"

namespace trustpcl::checks {

OracleCheckReport run_oracle_check(const std::vector<std::uint64_t>& seeds, const OracleCheckOptions& opt) {
  if (opt.d_max < 1) throw UsageError("oracle check: d_max must be >= 1");
  OracleCheckReport report;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    const oracle::TabularMdp mdp = oracle::random_mdp(seeds[k]);
    const oracle::TabularPolicy reference = oracle::random_reference(mdp, seeds[k]);
    OracleCheckRow row;
    row.seed = seeds[k];
    row.num_states = mdp.num_states;
    row.num_actions = mdp.num_actions;
    for (const auto& [tau, lambda] : oracle::kCorpusSettings) {
      oracle::SoftmaxSolution sol = oracle::softmax_value_iteration(mdp, reference, tau, lambda);
      if (opt.corrupt_first && k == 0) sol.values[0] += 1e-3;
      row.converged = row.converged && sol.converged;
      row.max_residual = std::max(row.max_residual, sol.residual);
      for (int d = 1; d <= opt.d_max; ++d) {
        row.max_violation = std::max(row.max_violation, oracle::verify_consistency(mdp, sol, reference, tau, lambda, d));
      }
    }
    report.overall_max_violation = std::max(report.overall_max_violation, row.max_violation);
    report.passed = report.passed && row.converged && row.max_residual <= opt.residual_threshold &&
                    row.max_violation <= opt.violation_threshold;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace trustpcl::checks

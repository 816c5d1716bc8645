#pragma once

#include <cstdint>
#include <vector>

#include "oracle/mdp.hpp"

namespace trustpcl::oracle {

struct TabularPolicy {
  Mat probs;  // num_states x num_actions

  static TabularPolicy uniform(int num_states, int num_actions);
  /// Rows must sum to 1 within 1e-12 and be non-negative (strictly positive
  /// when `strict`).
  void validate(bool strict = false) const;
};

struct SoftmaxSolution {
  Vec values;          // V*
  Mat policy;          // pi*, softmax of the soft action values per state
  Mat log_policy;      // log pi*, kept separately to avoid underflow
  double residual = 0.0;  // max_s |backup(V*)(s) - V*(s)|
  int sweeps = 0;
  bool converged = false;
};

struct SolverOptions {
  double tolerance = 1e-10;
  int max_sweeps = 100000;
};

/// Softmax value iteration on the transformed reward r + lambda log pi_ref at
/// temperature tau + lambda. Infinite-horizon tables iterate to a sup-norm
/// change of `tolerance`; finite-horizon tables run exactly `horizon`
/// backward passes from V = 0.
SoftmaxSolution softmax_value_iteration(const TabularMdp& mdp, const TabularPolicy& reference, double tau,
                                        double lambda, const SolverOptions& options = {});

/// One soft backup of `values`.
Vec soft_backup(const TabularMdp& mdp, const TabularPolicy& reference, double tau, double lambda, const Vec& values);

/// Largest violation of the d-step consistency identity over every start
/// state and every action sequence of length d, expectations over next
/// states taken exactly.
double verify_consistency(const TabularMdp& mdp, const SoftmaxSolution& solution, const TabularPolicy& reference,
                          double tau, double lambda, int d);

/// KL between the trajectory distributions of two policies over `horizon`
/// steps from the start state, by exhaustive enumeration.
double exact_trajectory_kl(const TabularMdp& mdp, const TabularPolicy& a, const TabularPolicy& b);

struct Objectives {
  Vec expected_reward;   // O_ER
  Vec entropy;           // discounted entropy
  Vec relative_entropy;  // discounted relative entropy against the reference
  Vec entropy_objective;  // O_ER + tau * entropy
  Vec relent_objective;   // entropy_objective - lambda * relative_entropy
};

/// Exact per-state objectives of `policy` (linear solve, or backward passes
/// for finite horizons).
Objectives evaluate_objectives(const TabularMdp& mdp, const TabularPolicy& policy, const TabularPolicy& reference,
                               double tau, double lambda);

}  // namespace trustpcl::oracle

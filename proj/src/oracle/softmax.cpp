#include "oracle/softmax.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "common/error.hpp"

namespace trustpcl::oracle {

TabularPolicy TabularPolicy::uniform(int num_states, int num_actions) {
  return {Mat::Constant(num_states, num_actions, 1.0 / num_actions)};
}

void TabularPolicy::validate(bool strict) const {
  for (Eigen::Index s = 0; s < probs.rows(); ++s) {
    if (std::abs(probs.row(s).sum() - 1.0) > 1e-12) {
      throw DomainError("tabular policy: row " + std::to_string(s) + " does not sum to 1");
    }
    const double lo = probs.row(s).minCoeff();
    if (lo < 0.0 || (strict && lo <= 0.0)) {
      throw DomainError("tabular policy: row " + std::to_string(s) + (strict ? " is not strictly positive" : " is negative"));
    }
  }
}

namespace {

void check_inputs(const TabularMdp& mdp, const TabularPolicy& reference, double tau, double lambda) {
  mdp.validate();
  if (!(tau >= 0.0) || !(lambda >= 0.0)) throw ConfigError("softmax solver: tau and lambda must be >= 0");
  if (!(tau + lambda > 0.0)) throw ConfigError("softmax solver: tau + lambda must be positive");
  if (reference.probs.rows() != mdp.num_states || reference.probs.cols() != mdp.num_actions) {
    throw ShapeError("softmax solver: reference policy has wrong shape");
  }
  reference.validate(false);
  if (lambda > 0.0 && reference.probs.minCoeff() <= 0.0) {
    throw DomainError("softmax solver: reference policy must be strictly positive when lambda > 0");
  }
}

// Per (s, a) exponent (r~ + gamma E V) / (tau + lambda), written so that the
// lambda log pi_ref part is not first scaled up by lambda.
Mat exponents(const TabularMdp& mdp, const TabularPolicy& reference, double tau, double lambda, const Vec& values) {
  const double temp = tau + lambda;
  Mat e(mdp.num_states, mdp.num_actions);
  for (int s = 0; s < mdp.num_states; ++s) {
    for (int a = 0; a < mdp.num_actions; ++a) {
      double x = (mdp.rewards(s, a) + mdp.gamma * mdp.transitions[s][a].dot(values)) / temp;
      if (lambda > 0.0) x += (lambda / temp) * std::log(reference.probs(s, a));
      e(s, a) = x;
    }
  }
  return e;
}

double log_sum_exp(const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  const double m = x.maxCoeff();
  return m + std::log((x.array() - m).exp().sum());
}

}  // namespace

Vec soft_backup(const TabularMdp& mdp, const TabularPolicy& reference, double tau, double lambda, const Vec& values) {
  const Mat e = exponents(mdp, reference, tau, lambda, values);
  Vec out(mdp.num_states);
  for (int s = 0; s < mdp.num_states; ++s) out[s] = (tau + lambda) * log_sum_exp(e.row(s));
  return out;
}

SoftmaxSolution softmax_value_iteration(const TabularMdp& mdp, const TabularPolicy& reference, double tau,
                                        double lambda, const SolverOptions& options) {
  check_inputs(mdp, reference, tau, lambda);
  SoftmaxSolution sol;
  Vec v = Vec::Zero(mdp.num_states);
  if (mdp.horizon) {
    for (int k = 0; k < *mdp.horizon; ++k) v = soft_backup(mdp, reference, tau, lambda, v);
    sol.sweeps = *mdp.horizon;
    sol.converged = true;
  } else {
    for (sol.sweeps = 1; sol.sweeps <= options.max_sweeps; ++sol.sweeps) {
      Vec next = soft_backup(mdp, reference, tau, lambda, v);
      const double change = (next - v).cwiseAbs().maxCoeff();
      v = std::move(next);
      if (change <= options.tolerance) {
        sol.converged = true;
        break;
      }
    }
  }
  sol.values = v;
  const Mat e = exponents(mdp, reference, tau, lambda, v);
  sol.log_policy.resize(mdp.num_states, mdp.num_actions);
  Vec backed(mdp.num_states);
  for (int s = 0; s < mdp.num_states; ++s) {
    const double lse = log_sum_exp(e.row(s));
    sol.log_policy.row(s) = (e.row(s).array() - lse).matrix();
    backed[s] = (tau + lambda) * lse;
  }
  sol.policy = sol.log_policy.array().exp().matrix();
  sol.residual = (backed - v).cwiseAbs().maxCoeff();
  return sol;
}

double verify_consistency(const TabularMdp& mdp, const SoftmaxSolution& solution, const TabularPolicy& reference,
                          double tau, double lambda, int d) {
  if (d < 1) throw ConfigError("verify_consistency: d must be >= 1");
  const double temp = tau + lambda;
  const int S = mdp.num_states;
  const int A = mdp.num_actions;

  // Expected per-step term for each (s, a).
  Mat step(S, A);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      double x = mdp.rewards(s, a) - temp * solution.log_policy(s, a);
      if (lambda != 0.0) x += lambda * std::log(reference.probs(s, a));
      step(s, a) = x;
    }
  }

  double worst = 0.0;
  // Depth-first over action sequences, carrying the state distribution and
  // the discounted expected sum so far.
  std::function<void(const Vec&, double, double, int, double)> walk = [&](const Vec& dist, double acc,
                                                                         double discount, int depth, double v0) {
    if (depth == d) {
      const double rhs = acc + discount * dist.dot(solution.values);
      worst = std::max(worst, std::abs(v0 - rhs));
      return;
    }
    for (int a = 0; a < A; ++a) {
      Vec next = Vec::Zero(S);
      double term = 0.0;
      for (int s = 0; s < S; ++s) {
        if (dist[s] == 0.0) continue;
        term += dist[s] * step(s, a);
        next += dist[s] * mdp.transitions[s][a];
      }
      walk(next, acc + discount * term, discount * mdp.gamma, depth + 1, v0);
    }
  };
  for (int s0 = 0; s0 < S; ++s0) {
    Vec dist = Vec::Zero(S);
    dist[s0] = 1.0;
    walk(dist, 0.0, 1.0, 0, solution.values[s0]);
  }
  return worst;
}

double exact_trajectory_kl(const TabularMdp& mdp, const TabularPolicy& pa, const TabularPolicy& pb) {
  if (!mdp.horizon) throw ConfigError("exact_trajectory_kl: needs a finite horizon");
  const int H = *mdp.horizon;
  if (H * std::log(static_cast<double>(mdp.num_actions)) > std::log(1e7)) {
    throw InfeasibleError("exact_trajectory_kl: A^H exceeds 1e7 trajectories");
  }
  double kl = 0.0;
  std::function<void(int, int, double, double)> walk = [&](int s, int depth, double prob, double log_ratio) {
    if (depth == H) {
      kl += prob * log_ratio;
      return;
    }
    for (int a = 0; a < mdp.num_actions; ++a) {
      const double p = pa.probs(s, a);
      if (p == 0.0) continue;
      const double q = pb.probs(s, a);
      if (q == 0.0) throw DomainError("exact_trajectory_kl: second policy is zero where the first is positive");
      const double lr = log_ratio + std::log(p) - std::log(q);
      const Vec& next = mdp.transitions[s][a];
      for (int s2 = 0; s2 < mdp.num_states; ++s2) {
        if (next[s2] > 0.0) walk(s2, depth + 1, prob * p * next[s2], lr);
      }
    }
  };
  walk(mdp.start_state, 0, 1.0, 0.0);
  return kl;
}

Objectives evaluate_objectives(const TabularMdp& mdp, const TabularPolicy& policy, const TabularPolicy& reference,
                               double tau, double lambda) {
  mdp.validate();
  if (!mdp.horizon && !(mdp.gamma < 1.0)) throw ConfigError("evaluate_objectives: needs gamma < 1 or a finite horizon");
  const int S = mdp.num_states;
  const int A = mdp.num_actions;
  Mat P = Mat::Zero(S, S);
  Mat c = Mat::Zero(S, 3);  // reward, entropy, relative entropy per step
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      const double p = policy.probs(s, a);
      if (p == 0.0) continue;
      P.row(s) += p * mdp.transitions[s][a].transpose();
      c(s, 0) += p * mdp.rewards(s, a);
      c(s, 1) -= p * std::log(p);
      if (reference.probs(s, a) == 0.0) {
        throw DomainError("evaluate_objectives: reference is zero where the policy is positive");
      }
      c(s, 2) += p * (std::log(p) - std::log(reference.probs(s, a)));
    }
  }
  Mat x;
  if (mdp.horizon) {
    x = Mat::Zero(S, 3);
    for (int k = 0; k < *mdp.horizon; ++k) x = c + mdp.gamma * P * x;
  } else {
    const Mat system = Mat::Identity(S, S) - mdp.gamma * P;
    x = system.partialPivLu().solve(c);
  }
  Objectives o;
  o.expected_reward = x.col(0);
  o.entropy = x.col(1);
  o.relative_entropy = x.col(2);
  o.entropy_objective = o.expected_reward + tau * o.entropy;
  o.relent_objective = o.entropy_objective - lambda * o.relative_entropy;
  return o;
}

}  // namespace trustpcl::oracle

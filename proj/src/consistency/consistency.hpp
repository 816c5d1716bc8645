#pragma once

#include <vector>

#include "common/types.hpp"
#include "models/policy.hpp"
#include "replay/replay.hpp"

namespace trustpcl::consistency {

struct ConsistencyConfig {
  int rollout = 10;  // d
  double gamma = 0.995;
  double tau = 0.0;
  double lambda = 0.0;
  double huber_delta = 1.0;

  void validate() const;
};

enum class WindowEnd { kInterior, kTerminal, kTimeout };

/// Sub-trajectory s_t .. s_{t+d'} with d' actions and rewards.
struct Window {
  std::vector<Vec> observations;  // d' + 1 entries
  std::vector<Action> actions;    // d' entries
  std::vector<double> rewards;    // d' entries
  WindowEnd end = WindowEnd::kInterior;

  int length() const { return static_cast<int>(actions.size()); }
  void validate() const;
};

/// Live parameters (policy, value), the lagged value used to bootstrap the
/// window end, and the reference policy of the relative-entropy term.
struct ModelBundle {
  const models::Policy& policy;
  const models::ValueFunction& value;
  const models::ValueFunction& lagged_value;
  const models::Policy& reference;
};

struct ConsistencyResult {
  double error = 0.0;
  ParamVector grad_policy;
  ParamVector grad_value;
};

/// C = -V(s_t) + gamma^d' V_end
///     + sum_i gamma^i (r_{t+i} - (tau + lambda) log pi(a|s) + lambda log pi_ref(a|s)),
/// V_end = 0 after a terminal, the lagged value otherwise. Gradients treat the
/// lagged value and the reference policy as constants.
ConsistencyResult consistency_error(const Window& window, const ModelBundle& models, const ConsistencyConfig& cfg);

/// consistency_error with lambda = 0 (no reference policy involved).
double entropy_only_error(const Window& window, const models::Policy& policy, const models::ValueFunction& value,
                          const models::ValueFunction& lagged_value, const ConsistencyConfig& cfg);

struct BatchResult {
  double loss = 0.0;
  ParamVector grad_policy;
  ParamVector grad_value;
  int num_windows = 0;
};

/// Huber-penalized consistency loss over every window start inside each
/// sampled segment. Windows run into the next segment of the same episode
/// only when that segment is also in the batch; otherwise they truncate at
/// the segment end.
BatchResult batch_loss_and_grads(const std::vector<const replay::Segment*>& segments, const ModelBundle& models,
                                 const ConsistencyConfig& cfg, bool policy_grad = true);

/// The windows batch_loss_and_grads visits, materialized.
std::vector<Window> enumerate_windows(const std::vector<const replay::Segment*>& segments, int rollout);

}  // namespace trustpcl::consistency

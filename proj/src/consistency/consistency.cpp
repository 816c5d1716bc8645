#include "consistency/consistency.hpp"

#include <cmath>
#include <string>

#include "common/error.hpp"
#include "nn/huber.hpp"

namespace trustpcl::consistency {

void ConsistencyConfig::validate() const {
  if (rollout < 1) throw ConfigError("consistency: rollout must be >= 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("consistency: gamma must lie in (0, 1]");
  if (!(tau >= 0.0)) throw ConfigError("consistency: tau must be >= 0");
  if (!(lambda >= 0.0)) throw ConfigError("consistency: lambda must be >= 0");
  if (!(huber_delta > 0.0)) throw ConfigError("consistency: huber_delta must be > 0");
}

void Window::validate() const {
  if (actions.empty()) throw ShapeError("window: empty");
  if (observations.size() != actions.size() + 1 || rewards.size() != actions.size()) {
    throw ShapeError("window: expected d+1 observations, d actions and d rewards");
  }
}

ConsistencyResult consistency_error(const Window& window, const ModelBundle& m, const ConsistencyConfig& cfg) {
  window.validate();
  const int d = window.length();
  const double coef = cfg.tau + cfg.lambda;

  ConsistencyResult out;
  out.grad_policy = ParamVector::Zero(static_cast<Eigen::Index>(m.policy.num_params()));
  out.grad_value = ParamVector::Zero(static_cast<Eigen::Index>(m.value.num_params()));

  double c = -m.value.value_accumulate(window.observations[0], -1.0, out.grad_value);
  double discount = 1.0;
  for (int i = 0; i < d; ++i) {
    const Vec& s = window.observations[i];
    const Action& a = window.actions[i];
    const double log_pi = m.policy.log_density_accumulate(s, a, -coef * discount, out.grad_policy);
    double term = window.rewards[i] - coef * log_pi;
    if (cfg.lambda != 0.0) term += cfg.lambda * m.reference.log_density(s, a);
    c += discount * term;
    discount *= cfg.gamma;
  }
  if (window.end != WindowEnd::kTerminal) c += discount * m.lagged_value.value(window.observations[d]);
  out.error = c;
  return out;
}

double entropy_only_error(const Window& window, const models::Policy& policy, const models::ValueFunction& value,
                          const models::ValueFunction& lagged_value, const ConsistencyConfig& cfg) {
  ConsistencyConfig c = cfg;
  c.lambda = 0.0;
  return consistency_error(window, {policy, value, lagged_value, policy}, c).error;
}

namespace {

// A sampled segment followed by as many co-sampled successors as a window
// starting inside it can reach.
struct ExtendedSegment {
  std::vector<const replay::Transition*> transitions;
  int own_length = 0;
  Vec next_observation;
  bool ends_episode = false;
  bool ends_terminal = false;
};

ExtendedSegment extend(const replay::Segment& seg, const std::vector<const replay::Segment*>& batch, int rollout) {
  ExtendedSegment ext;
  ext.own_length = seg.length();
  const int needed = seg.length() - 1 + rollout;
  const replay::Segment* cur = &seg;
  while (true) {
    int i = 0;
    for (; i < cur->length() && static_cast<int>(ext.transitions.size()) < needed; ++i) {
      ext.transitions.push_back(&cur->transitions[static_cast<std::size_t>(i)]);
    }
    if (i < cur->length()) {
      ext.next_observation = cur->transitions[static_cast<std::size_t>(i)].observation;
      return ext;
    }
    ext.next_observation = cur->next_observation;
    if (cur->ends_episode()) {
      ext.ends_episode = true;
      ext.ends_terminal = cur->transitions.back().terminal;
      return ext;
    }
    if (static_cast<int>(ext.transitions.size()) >= needed) return ext;
    const int next_start = cur->start_index + cur->length();
    const replay::Segment* next = nullptr;
    for (const auto* cand : batch) {
      if (cand->episode_id == cur->episode_id && cand->start_index == next_start) {
        next = cand;
        break;
      }
    }
    if (!next) return ext;
    cur = next;
  }
}

const Vec& state_at(const ExtendedSegment& ext, int i) {
  return i < static_cast<int>(ext.transitions.size()) ? ext.transitions[static_cast<std::size_t>(i)]->observation
                                                      : ext.next_observation;
}

WindowEnd end_kind(const ExtendedSegment& ext, int end_index) {
  if (end_index < static_cast<int>(ext.transitions.size()) || !ext.ends_episode) return WindowEnd::kInterior;
  return ext.ends_terminal ? WindowEnd::kTerminal : WindowEnd::kTimeout;
}

}  // namespace

std::vector<Window> enumerate_windows(const std::vector<const replay::Segment*>& segments, int rollout) {
  std::vector<Window> windows;
  for (const auto* seg : segments) {
    const ExtendedSegment ext = extend(*seg, segments, rollout);
    const int m = static_cast<int>(ext.transitions.size());
    for (int p = 0; p < ext.own_length; ++p) {
      const int e = std::min(p + rollout, m);
      Window w;
      for (int i = p; i < e; ++i) {
        const auto* t = ext.transitions[static_cast<std::size_t>(i)];
        w.observations.push_back(t->observation);
        w.actions.push_back(t->action);
        w.rewards.push_back(t->reward);
      }
      w.observations.push_back(state_at(ext, e));
      w.end = end_kind(ext, e);
      windows.push_back(std::move(w));
    }
  }
  return windows;
}

BatchResult batch_loss_and_grads(const std::vector<const replay::Segment*>& segments, const ModelBundle& models,
                                 const ConsistencyConfig& cfg, bool policy_grad) {
  cfg.validate();
  if (segments.empty()) throw UsageError("batch_loss_and_grads: empty batch");
  const double coef = cfg.tau + cfg.lambda;
  const int d = cfg.rollout;

  BatchResult out;
  out.grad_policy = ParamVector::Zero(static_cast<Eigen::Index>(models.policy.num_params()));
  out.grad_value = ParamVector::Zero(static_cast<Eigen::Index>(models.value.num_params()));

  for (const auto* seg : segments) {
    const ExtendedSegment ext = extend(*seg, segments, d);
    const int n = ext.own_length;
    const int m = static_cast<int>(ext.transitions.size());

    std::vector<double> step_term(static_cast<std::size_t>(m));
    std::vector<double> value(static_cast<std::size_t>(n));
    std::vector<double> lagged(static_cast<std::size_t>(m + 1), 0.0);
    for (int i = 0; i < m; ++i) {
      const auto* t = ext.transitions[static_cast<std::size_t>(i)];
      double term = t->reward - coef * models.policy.log_density(t->observation, t->action);
      if (cfg.lambda != 0.0) term += cfg.lambda * models.reference.log_density(t->observation, t->action);
      step_term[static_cast<std::size_t>(i)] = term;
      if (i < n) value[static_cast<std::size_t>(i)] = models.value.value(t->observation);
      if (i >= 1) lagged[static_cast<std::size_t>(i)] = models.lagged_value.value(t->observation);
    }
    if (end_kind(ext, m) != WindowEnd::kTerminal) {
      lagged[static_cast<std::size_t>(m)] = models.lagged_value.value(ext.next_observation);
    }

    std::vector<double> policy_coef(static_cast<std::size_t>(m), 0.0);
    std::vector<double> value_coef(static_cast<std::size_t>(n), 0.0);
    for (int p = 0; p < n; ++p) {
      const int e = std::min(p + d, m);
      double c = -value[static_cast<std::size_t>(p)];
      double discount = 1.0;
      for (int i = p; i < e; ++i) {
        c += discount * step_term[static_cast<std::size_t>(i)];
        discount *= cfg.gamma;
      }
      if (end_kind(ext, e) != WindowEnd::kTerminal) c += discount * lagged[static_cast<std::size_t>(e)];

      const auto h = nn::huber(c, cfg.huber_delta);
      out.loss += h.value;
      ++out.num_windows;
      value_coef[static_cast<std::size_t>(p)] -= h.derivative;
      discount = 1.0;
      for (int i = p; i < e; ++i) {
        policy_coef[static_cast<std::size_t>(i)] -= h.derivative * coef * discount;
        discount *= cfg.gamma;
      }
    }

    for (int p = 0; p < n; ++p) {
      const double w = value_coef[static_cast<std::size_t>(p)];
      if (w != 0.0) models.value.value_accumulate(ext.transitions[static_cast<std::size_t>(p)]->observation, w, out.grad_value);
    }
    if (policy_grad) {
      for (int i = 0; i < m; ++i) {
        const double w = policy_coef[static_cast<std::size_t>(i)];
        if (w == 0.0) continue;
        const auto* t = ext.transitions[static_cast<std::size_t>(i)];
        models.policy.log_density_accumulate(t->observation, t->action, w, out.grad_policy);
      }
    }
  }
  if (!std::isfinite(out.loss)) throw NumericError("batch_loss_and_grads: non-finite loss");
  return out;
}

}  // namespace trustpcl::consistency

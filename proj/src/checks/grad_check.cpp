#include "checks/grad_check.hpp"

#include <cmath>
#include <memory>

#include "consistency/consistency.hpp"
#include "models/networks.hpp"
#include "nn/gradcheck.hpp"

namespace trustpcl::checks {

namespace {

const std::vector<int> kSmallHidden{6, 5};

Vec random_vec(int n, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

// Segments from two episodes: the first split in two contiguous pieces that
// are both in the batch and ends in a timeout, the second ends in a terminal.
std::vector<replay::Segment> random_segments(const models::Policy& behaviour, int obs_dim, Rng& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto make = [&](std::uint64_t episode, int start, int length, bool terminal, bool timeout) {
    replay::Segment seg;
    seg.episode_id = episode;
    seg.start_index = start;
    for (int i = 0; i < length; ++i) {
      replay::Transition t;
      t.observation = random_vec(obs_dim, rng);
      t.action = behaviour.sample(t.observation, rng);
      t.reward = unit(rng);
      t.log_prob = behaviour.log_density(t.observation, t.action);
      seg.transitions.push_back(std::move(t));
    }
    seg.transitions.back().terminal = terminal;
    seg.transitions.back().timeout = timeout;
    seg.next_observation = random_vec(obs_dim, rng);
    return seg;
  };
  std::vector<replay::Segment> segs;
  segs.push_back(make(0, 0, 4, false, false));
  segs.push_back(make(0, 4, 3, false, true));
  segs.push_back(make(1, 0, 5, true, false));
  segs.push_back(make(2, 7, 4, false, false));
  return segs;
}

template <class Fn>
nn::LossFn hooked(Fn fn, bool broken) {
  return [fn, broken](const ParamVector& p, ParamVector* grad) {
    const double v = fn(p, grad);
    if (broken && grad && grad->size() > 0) (*grad)[0] += 1e-2 + 0.1 * std::abs((*grad)[0]);
    return v;
  };
}

GradCheckEntry check(const std::string& name, const nn::LossFn& loss, const ParamVector& at, double h) {
  return {name, nn::finite_diff_check(loss, at, h), static_cast<int>(at.size())};
}

void batch_checks(const std::string& label, models::Policy& policy, const models::Policy& reference, int obs_dim,
                  Rng& rng, const GradCheckOptions& opt, std::vector<GradCheckEntry>& out) {
  models::ValueNet value(obs_dim, kSmallHidden);
  value.net().initialize(rng, 1.0);
  models::ValueNet lagged(obs_dim, kSmallHidden);
  lagged.net().initialize(rng, 1.0);

  const auto segments = random_segments(policy, obs_dim, rng);
  std::vector<const replay::Segment*> batch;
  for (const auto& s : segments) batch.push_back(&s);

  for (double lambda : {0.0, 0.7}) {
    consistency::ConsistencyConfig cfg;
    cfg.rollout = 3;
    cfg.gamma = 0.95;
    cfg.tau = 0.3;
    cfg.lambda = lambda;
    cfg.huber_delta = 1.5;
    const std::string suffix = lambda == 0.0 ? " (lambda=0)" : " (lambda>0)";

    auto policy_loss = [&](const ParamVector& p, ParamVector* grad) {
      auto pol = policy.clone();
      pol->set_params(p);
      const auto r = consistency::batch_loss_and_grads(batch, {*pol, value, lagged, reference}, cfg);
      if (grad) *grad = r.grad_policy;
      return r.loss;
    };
    out.push_back(check("batch loss / " + label + " policy" + suffix, hooked(policy_loss, opt.break_gradient),
                        policy.params(), opt.step));

    auto value_loss = [&](const ParamVector& p, ParamVector* grad) {
      models::ValueNet v = value;
      v.set_params(p);
      const auto r = consistency::batch_loss_and_grads(batch, {policy, v, lagged, reference}, cfg, false);
      if (grad) *grad = r.grad_value;
      return r.loss;
    };
    out.push_back(check("batch loss / " + label + " value" + suffix, hooked(value_loss, opt.break_gradient),
                        value.params(), opt.step));
  }
}

}  // namespace

std::vector<GradCheckEntry> run_grad_checks(const GradCheckOptions& opt) {
  Rng rng(opt.seed);
  std::vector<GradCheckEntry> out;
  const int obs_dim = 3;

  models::GaussianPolicy gauss(obs_dim, 2, kSmallHidden);
  gauss.mean_net().initialize(rng, 1.0);
  gauss.log_std() = random_vec(2, rng, 0.3);
  {
    const Vec obs = random_vec(obs_dim, rng);
    const Action a = gauss.sample(obs, rng);
    auto loss = [&](const ParamVector& p, ParamVector* grad) {
      models::GaussianPolicy g = gauss;
      g.set_params(p);
      if (!grad) return g.log_density(obs, a);
      return g.log_density_with_grad(obs, a, *grad);
    };
    out.push_back(check("gaussian log-density", hooked(loss, opt.break_gradient), gauss.params(), opt.step));
  }

  models::CategoricalPolicy cat(obs_dim, 4, kSmallHidden);
  cat.logit_net().initialize(rng, 1.0);
  {
    const Vec obs = random_vec(obs_dim, rng);
    const Action a = cat.sample(obs, rng);
    auto loss = [&](const ParamVector& p, ParamVector* grad) {
      models::CategoricalPolicy c = cat;
      c.set_params(p);
      if (!grad) return c.log_density(obs, a);
      return c.log_density_with_grad(obs, a, *grad);
    };
    out.push_back(check("categorical log-density", hooked(loss, opt.break_gradient), cat.params(), opt.step));
  }

  {
    models::ValueNet value(obs_dim, kSmallHidden);
    value.net().initialize(rng, 1.0);
    const Vec obs = random_vec(obs_dim, rng);
    auto loss = [&](const ParamVector& p, ParamVector* grad) {
      models::ValueNet v = value;
      v.set_params(p);
      if (!grad) return v.value(obs);
      return v.value_with_grad(obs, *grad);
    };
    out.push_back(check("value network", hooked(loss, opt.break_gradient), value.params(), opt.step));
  }

  const auto gauss_ref = gauss.clone();
  {
    Vec shifted = gauss_ref->params() + random_vec(static_cast<int>(gauss.num_params()), rng, 0.1);
    gauss_ref->set_params(shifted);
  }
  batch_checks("gaussian", gauss, *gauss_ref, obs_dim, rng, opt, out);
  const models::UniformPolicy uniform(obs_dim, 4);
  batch_checks("categorical", cat, uniform, obs_dim, rng, opt, out);
  return out;
}

}  // namespace trustpcl::checks

#include "envs/chain.hpp"

#include "common/error.hpp"
#include "envs/pendulum.hpp"
#include "envs/point_mass.hpp"

namespace trustpcl::envs {

ChainEnv::ChainEnv(oracle::TabularMdp mdp, std::string id) : mdp_(std::move(mdp)), id_(std::move(id)) {
  mdp_.validate();
}

EnvSpec ChainEnv::spec() const {
  EnvSpec s;
  s.observation_dim = mdp_.num_states;
  s.action_kind = ActionKind::kDiscrete;
  s.num_actions = mdp_.num_actions;
  s.observation_low = Vec::Zero(mdp_.num_states);
  s.observation_high = Vec::Ones(mdp_.num_states);
  s.max_steps = mdp_.horizon.value_or(kDefaultMaxSteps);
  return s;
}

Vec ChainEnv::one_hot(int s) const {
  Vec v = Vec::Zero(mdp_.num_states);
  v[s] = 1.0;
  return v;
}

Vec ChainEnv::reset(std::uint64_t seed) {
  rng_.seed(seed);
  state_ = mdp_.start_state;
  steps_ = 0;
  active_ = true;
  return one_hot(state_);
}

StepResult ChainEnv::step(const Action& action) {
  if (!active_) throw UsageError("chain: step called without an active episode");
  if (action.size() != 1) throw ShapeError("chain: discrete action must have one entry");
  const int a = action_index(action);
  if (a < 0 || a >= mdp_.num_actions) throw ShapeError("chain: action index out of range");

  StepResult r;
  r.reward = mdp_.rewards(state_, a);
  const Vec& p = mdp_.transitions[state_][a];
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double draw = u(rng_);
  double acc = 0.0;
  int next = mdp_.num_states - 1;
  for (int k = 0; k < mdp_.num_states; ++k) {
    acc += p[k];
    if (draw < acc) {
      next = k;
      break;
    }
  }
  // Guard against round-off landing on a zero-probability tail state.
  if (p[next] == 0.0) next = mdp_.next_state(state_, a);
  state_ = next;
  ++steps_;
  r.terminal = false;
  r.timeout = steps_ >= spec().max_steps;
  r.observation = one_hot(state_);
  if (r.timeout) active_ = false;
  return r;
}

std::unique_ptr<Environment> make_env(const std::string& id) {
  if (id == "point_mass") return std::make_unique<PointMass>();
  if (id == "pendulum") return std::make_unique<Pendulum>();
  if (id == "chain") return std::make_unique<ChainEnv>(oracle::default_chain());
  const std::string prefix = "chain:";
  if (id.rfind(prefix, 0) == 0) return std::make_unique<ChainEnv>(oracle::load_mdp(id.substr(prefix.size())), id);
  throw ConfigError("unknown env '" + id + "'");
}

}  // namespace trustpcl::envs

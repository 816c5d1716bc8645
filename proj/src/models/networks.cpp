#include "models/networks.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "common/error.hpp"

namespace trustpcl::models {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // ln(2*pi)

void check_obs(const Vec& obs, int dim, const char* who) {
  if (obs.size() != dim) {
    throw ShapeError(std::string(who) + ": observation has " + std::to_string(obs.size()) +
                     " entries, expected " + std::to_string(dim));
  }
}

int checked_index(const Action& action, int num_actions, const char* who) {
  if (action.size() != 1) throw ShapeError(std::string(who) + ": discrete action must have one entry");
  const int idx = action_index(action);
  if (idx < 0 || idx >= num_actions || static_cast<double>(idx) != action[0]) {
    throw ShapeError(std::string(who) + ": action index out of range");
  }
  return idx;
}

// Log-softmax of `logits`, max-shifted.
Vec log_softmax(const Vec& logits) {
  const double m = logits.maxCoeff();
  const double lse = m + std::log((logits.array() - m).exp().sum());
  return (logits.array() - lse).matrix();
}

}  // namespace

// ---------------------------------------------------------------- Gaussian

GaussianPolicy::GaussianPolicy(int observation_dim, int action_dim, const std::vector<int>& hidden)
    : mean_net_(observation_dim, hidden, action_dim), log_std_(Vec::Zero(action_dim)) {}

void GaussianPolicy::initialize(Rng& rng, double initial_log_std) {
  mean_net_.initialize(rng);
  log_std_.setConstant(initial_log_std);
}

ParamVector GaussianPolicy::params() const {
  ParamVector p(static_cast<Eigen::Index>(num_params()));
  const auto n = static_cast<Eigen::Index>(mean_net_.num_params());
  p.head(n) = mean_net_.flatten();
  p.tail(log_std_.size()) = log_std_;
  return p;
}

void GaussianPolicy::set_params(const ParamVector& params) {
  if (static_cast<std::size_t>(params.size()) != num_params()) {
    throw ShapeError("gaussian policy: parameter vector has wrong length");
  }
  const auto n = static_cast<Eigen::Index>(mean_net_.num_params());
  mean_net_.unflatten(params.head(n));
  log_std_ = params.tail(log_std_.size());
}

Action GaussianPolicy::sample(const Vec& obs, Rng& rng) const {
  check_obs(obs, observation_dim(), "gaussian policy");
  Vec a = mean(obs);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index j = 0; j < a.size(); ++j) a[j] += std::exp(log_std_[j]) * normal(rng);
  return a;
}

Action GaussianPolicy::greedy(const Vec& obs) const {
  check_obs(obs, observation_dim(), "gaussian policy");
  return mean(obs);
}

double GaussianPolicy::log_density(const Vec& obs, const Action& action) const {
  check_obs(obs, observation_dim(), "gaussian policy");
  if (action.size() != action_dim()) throw ShapeError("gaussian policy: action has wrong dimension");
  const Vec mu = mean(obs);
  double lp = 0.0;
  for (Eigen::Index j = 0; j < mu.size(); ++j) {
    const double z = (action[j] - mu[j]) * std::exp(-log_std_[j]);
    lp += z * z + 2.0 * log_std_[j] + kLog2Pi;
  }
  return -0.5 * lp;
}

double GaussianPolicy::log_density_accumulate(const Vec& obs, const Action& action, double scale,
                                              Eigen::Ref<ParamVector> grad) const {
  check_obs(obs, observation_dim(), "gaussian policy");
  if (action.size() != action_dim()) throw ShapeError("gaussian policy: action has wrong dimension");
  if (static_cast<std::size_t>(grad.size()) != num_params()) {
    throw ShapeError("gaussian policy: gradient buffer has wrong length");
  }
  nn::MlpCache cache;
  const Vec mu = nn::mlp_forward(mean_net_, obs, &cache);
  Vec dmu(mu.size());
  double lp = 0.0;
  const auto n = static_cast<Eigen::Index>(mean_net_.num_params());
  for (Eigen::Index j = 0; j < mu.size(); ++j) {
    const double inv_std = std::exp(-log_std_[j]);
    const double z = (action[j] - mu[j]) * inv_std;
    lp += z * z + 2.0 * log_std_[j] + kLog2Pi;
    dmu[j] = z * inv_std;
    grad[n + j] += scale * (z * z - 1.0);
  }
  nn::mlp_backward_accumulate(mean_net_, cache, dmu, scale, grad.head(n));
  return -0.5 * lp;
}

// ------------------------------------------------------------- Categorical

CategoricalPolicy::CategoricalPolicy(int observation_dim, int num_actions, const std::vector<int>& hidden)
    : logit_net_(observation_dim, hidden, num_actions) {}

Vec CategoricalPolicy::probabilities(const Vec& obs) const {
  check_obs(obs, observation_dim(), "categorical policy");
  return log_softmax(nn::mlp_forward(logit_net_, obs)).array().exp().matrix();
}

Action CategoricalPolicy::sample(const Vec& obs, Rng& rng) const {
  const Vec p = probabilities(obs);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double u = uniform(rng);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    acc += p[k];
    if (u < acc) return discrete_action(static_cast<int>(k));
  }
  return discrete_action(static_cast<int>(p.size() - 1));
}

Action CategoricalPolicy::greedy(const Vec& obs) const {
  check_obs(obs, observation_dim(), "categorical policy");
  const Vec logits = nn::mlp_forward(logit_net_, obs);
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < logits.size(); ++k) {
    if (logits[k] > logits[best]) best = k;
  }
  return discrete_action(static_cast<int>(best));
}

double CategoricalPolicy::log_density(const Vec& obs, const Action& action) const {
  check_obs(obs, observation_dim(), "categorical policy");
  const int idx = checked_index(action, num_actions(), "categorical policy");
  return log_softmax(nn::mlp_forward(logit_net_, obs))[idx];
}

double CategoricalPolicy::log_density_accumulate(const Vec& obs, const Action& action, double scale,
                                                 Eigen::Ref<ParamVector> grad) const {
  check_obs(obs, observation_dim(), "categorical policy");
  const int idx = checked_index(action, num_actions(), "categorical policy");
  nn::MlpCache cache;
  const Vec logp = log_softmax(nn::mlp_forward(logit_net_, obs, &cache));
  Vec dlogits = -logp.array().exp().matrix();
  dlogits[idx] += 1.0;
  nn::mlp_backward_accumulate(logit_net_, cache, dlogits, scale, grad);
  return logp[idx];
}

// ----------------------------------------------------------------- Uniform

void UniformPolicy::set_params(const ParamVector& params) {
  if (params.size() != 0) throw ShapeError("uniform policy has no parameters");
}

Action UniformPolicy::sample(const Vec& obs, Rng& rng) const {
  check_obs(obs, observation_dim_, "uniform policy");
  std::uniform_int_distribution<int> pick(0, num_actions_ - 1);
  return discrete_action(pick(rng));
}

Action UniformPolicy::greedy(const Vec& obs) const {
  check_obs(obs, observation_dim_, "uniform policy");
  return discrete_action(0);
}

double UniformPolicy::log_density(const Vec& obs, const Action& action) const {
  check_obs(obs, observation_dim_, "uniform policy");
  checked_index(action, num_actions_, "uniform policy");
  return -std::log(static_cast<double>(num_actions_));
}

double UniformPolicy::log_density_accumulate(const Vec& obs, const Action& action, double,
                                             Eigen::Ref<ParamVector>) const {
  return log_density(obs, action);
}

// ------------------------------------------------------------------- Value

ValueNet::ValueNet(int observation_dim, const std::vector<int>& hidden) : net_(2 * observation_dim, hidden, 1) {}

Vec ValueNet::augment(const Vec& obs) {
  Vec x(2 * obs.size());
  x.head(obs.size()) = obs;
  x.tail(obs.size()) = obs.cwiseProduct(obs);
  return x;
}

double ValueNet::value(const Vec& obs) const {
  check_obs(obs, observation_dim(), "value net");
  return nn::mlp_forward(net_, augment(obs))[0];
}

double ValueNet::value_accumulate(const Vec& obs, double scale, Eigen::Ref<ParamVector> grad) const {
  check_obs(obs, observation_dim(), "value net");
  nn::MlpCache cache;
  const double v = nn::mlp_forward(net_, augment(obs), &cache)[0];
  nn::mlp_backward_accumulate(net_, cache, Vec::Ones(1), scale, grad);
  return v;
}

}  // namespace trustpcl::models

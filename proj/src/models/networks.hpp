#pragma once

#include <vector>

#include "models/policy.hpp"
#include "nn/mlp.hpp"

namespace trustpcl::models {

inline const std::vector<int> kDefaultHidden{64, 64};

/// Diagonal Gaussian with an MLP mean and a state-independent log-std.
/// Parameters: mean network (flattened) followed by the log-std vector.
class GaussianPolicy final : public Policy {
 public:
  GaussianPolicy(int observation_dim, int action_dim, const std::vector<int>& hidden = kDefaultHidden);

  std::unique_ptr<Policy> clone() const override { return std::make_unique<GaussianPolicy>(*this); }
  std::string kind() const override { return "gaussian"; }
  int observation_dim() const override { return mean_net_.input_dim(); }
  int action_dim() const { return mean_net_.output_dim(); }
  std::size_t num_params() const override { return mean_net_.num_params() + log_std_.size(); }
  ParamVector params() const override;
  void set_params(const ParamVector& params) override;

  Action sample(const Vec& obs, Rng& rng) const override;
  Action greedy(const Vec& obs) const override;
  double log_density(const Vec& obs, const Action& action) const override;
  double log_density_accumulate(const Vec& obs, const Action& action, double scale,
                                Eigen::Ref<ParamVector> grad) const override;

  Vec mean(const Vec& obs) const { return nn::mlp_forward(mean_net_, obs); }
  nn::MlpParams& mean_net() { return mean_net_; }
  const nn::MlpParams& mean_net() const { return mean_net_; }
  Vec& log_std() { return log_std_; }
  const Vec& log_std() const { return log_std_; }

  void initialize(Rng& rng, double initial_log_std = 0.0);

 private:
  nn::MlpParams mean_net_;
  Vec log_std_;
};

/// Softmax over MLP logits; actions are indices.
class CategoricalPolicy final : public Policy {
 public:
  CategoricalPolicy(int observation_dim, int num_actions, const std::vector<int>& hidden = kDefaultHidden);

  std::unique_ptr<Policy> clone() const override { return std::make_unique<CategoricalPolicy>(*this); }
  std::string kind() const override { return "categorical"; }
  int observation_dim() const override { return logit_net_.input_dim(); }
  int num_actions() const { return logit_net_.output_dim(); }
  std::size_t num_params() const override { return logit_net_.num_params(); }
  ParamVector params() const override { return logit_net_.flatten(); }
  void set_params(const ParamVector& params) override { logit_net_.unflatten(params); }

  Action sample(const Vec& obs, Rng& rng) const override;
  Action greedy(const Vec& obs) const override;
  double log_density(const Vec& obs, const Action& action) const override;
  double log_density_accumulate(const Vec& obs, const Action& action, double scale,
                                Eigen::Ref<ParamVector> grad) const override;

  Vec probabilities(const Vec& obs) const;
  nn::MlpParams& logit_net() { return logit_net_; }
  const nn::MlpParams& logit_net() const { return logit_net_; }

  void initialize(Rng& rng) { logit_net_.initialize(rng); }

 private:
  nn::MlpParams logit_net_;
};

/// Parameter-free uniform distribution over K discrete actions.
class UniformPolicy final : public Policy {
 public:
  UniformPolicy(int observation_dim, int num_actions) : observation_dim_(observation_dim), num_actions_(num_actions) {}

  std::unique_ptr<Policy> clone() const override { return std::make_unique<UniformPolicy>(*this); }
  std::string kind() const override { return "uniform"; }
  int observation_dim() const override { return observation_dim_; }
  std::size_t num_params() const override { return 0; }
  ParamVector params() const override { return ParamVector(0); }
  void set_params(const ParamVector& params) override;

  Action sample(const Vec& obs, Rng& rng) const override;
  Action greedy(const Vec& obs) const override;
  double log_density(const Vec& obs, const Action& action) const override;
  double log_density_accumulate(const Vec& obs, const Action& action, double scale,
                                Eigen::Ref<ParamVector> grad) const override;

 private:
  int observation_dim_;
  int num_actions_;
};

/// MLP value over the augmented observation [s, s*s].
class ValueNet final : public ValueFunction {
 public:
  ValueNet(int observation_dim, const std::vector<int>& hidden = kDefaultHidden);

  std::unique_ptr<ValueFunction> clone() const override { return std::make_unique<ValueNet>(*this); }
  int observation_dim() const override { return net_.input_dim() / 2; }
  std::size_t num_params() const override { return net_.num_params(); }
  ParamVector params() const override { return net_.flatten(); }
  void set_params(const ParamVector& params) override { net_.unflatten(params); }

  double value(const Vec& obs) const override;
  double value_accumulate(const Vec& obs, double scale, Eigen::Ref<ParamVector> grad) const override;

  nn::MlpParams& net() { return net_; }
  const nn::MlpParams& net() const { return net_; }
  void initialize(Rng& rng) { net_.initialize(rng); }

  static Vec augment(const Vec& obs);

 private:
  nn::MlpParams net_;
};

}  // namespace trustpcl::models

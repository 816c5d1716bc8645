#pragma once

#include "models/policy.hpp"
#include "oracle/softmax.hpp"

namespace trustpcl::oracle {

/// Table-backed policy over one-hot observations; parameters are per-state
/// logits, flattened row by row.
class TabularPolicyModel final : public models::Policy {
 public:
  explicit TabularPolicyModel(Mat logits) : logits_(std::move(logits)) {}
  /// Logits set to log(probs), so the model reproduces `policy`.
  static TabularPolicyModel from_policy(const TabularPolicy& policy);
  static TabularPolicyModel from_log_policy(const Mat& log_policy) { return TabularPolicyModel(log_policy); }

  std::unique_ptr<models::Policy> clone() const override { return std::make_unique<TabularPolicyModel>(*this); }
  std::string kind() const override { return "tabular"; }
  int observation_dim() const override { return static_cast<int>(logits_.rows()); }
  std::size_t num_params() const override { return static_cast<std::size_t>(logits_.size()); }
  ParamVector params() const override;
  void set_params(const ParamVector& params) override;

  Action sample(const Vec& obs, Rng& rng) const override;
  Action greedy(const Vec& obs) const override;
  double log_density(const Vec& obs, const Action& action) const override;
  double log_density_accumulate(const Vec& obs, const Action& action, double scale,
                                Eigen::Ref<ParamVector> grad) const override;

  Vec log_probabilities(int state) const;

 private:
  int state_of(const Vec& obs) const;
  Mat logits_;
};

/// Table-backed value over one-hot observations.
class TabularValueModel final : public models::ValueFunction {
 public:
  explicit TabularValueModel(Vec values) : values_(std::move(values)) {}

  std::unique_ptr<models::ValueFunction> clone() const override { return std::make_unique<TabularValueModel>(*this); }
  int observation_dim() const override { return static_cast<int>(values_.size()); }
  std::size_t num_params() const override { return static_cast<std::size_t>(values_.size()); }
  ParamVector params() const override { return values_; }
  void set_params(const ParamVector& params) override;

  double value(const Vec& obs) const override;
  double value_accumulate(const Vec& obs, double scale, Eigen::Ref<ParamVector> grad) const override;

 private:
  int state_of(const Vec& obs) const;
  Vec values_;
};

}  // namespace trustpcl::oracle

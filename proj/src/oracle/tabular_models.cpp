#include "oracle/tabular_models.hpp"

#include <cmath>

#include "common/error.hpp"

namespace trustpcl::oracle {

namespace {

int one_hot_index(const Vec& obs, Eigen::Index n) {
  if (obs.size() != n) throw ShapeError("tabular model: observation is not a one-hot of the right size");
  Eigen::Index s = 0;
  obs.maxCoeff(&s);
  return static_cast<int>(s);
}

}  // namespace

TabularPolicyModel TabularPolicyModel::from_policy(const TabularPolicy& policy) {
  return TabularPolicyModel(policy.probs.array().log().matrix());
}

ParamVector TabularPolicyModel::params() const {
  ParamVector p(logits_.size());
  Eigen::Index k = 0;
  for (Eigen::Index s = 0; s < logits_.rows(); ++s) {
    for (Eigen::Index a = 0; a < logits_.cols(); ++a) p[k++] = logits_(s, a);
  }
  return p;
}

void TabularPolicyModel::set_params(const ParamVector& params) {
  if (params.size() != logits_.size()) throw ShapeError("tabular policy: wrong parameter count");
  Eigen::Index k = 0;
  for (Eigen::Index s = 0; s < logits_.rows(); ++s) {
    for (Eigen::Index a = 0; a < logits_.cols(); ++a) logits_(s, a) = params[k++];
  }
}

int TabularPolicyModel::state_of(const Vec& obs) const { return one_hot_index(obs, logits_.rows()); }

Vec TabularPolicyModel::log_probabilities(int state) const {
  const Eigen::RowVectorXd row = logits_.row(state);
  const double m = row.maxCoeff();
  const double lse = m + std::log((row.array() - m).exp().sum());
  return (row.array() - lse).matrix().transpose();
}

Action TabularPolicyModel::sample(const Vec& obs, Rng& rng) const {
  const Vec p = log_probabilities(state_of(obs)).array().exp().matrix();
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  for (Eigen::Index a = 0; a < p.size(); ++a) {
    acc += p[a];
    if (u < acc) return discrete_action(static_cast<int>(a));
  }
  return discrete_action(static_cast<int>(p.size() - 1));
}

Action TabularPolicyModel::greedy(const Vec& obs) const {
  Eigen::Index best = 0;
  logits_.row(state_of(obs)).maxCoeff(&best);
  return discrete_action(static_cast<int>(best));
}

double TabularPolicyModel::log_density(const Vec& obs, const Action& action) const {
  const int a = action_index(action);
  if (a < 0 || a >= logits_.cols()) throw ShapeError("tabular policy: action out of range");
  return log_probabilities(state_of(obs))[a];
}

double TabularPolicyModel::log_density_accumulate(const Vec& obs, const Action& action, double scale,
                                                  Eigen::Ref<ParamVector> grad) const {
  const int s = state_of(obs);
  const int a = action_index(action);
  if (a < 0 || a >= logits_.cols()) throw ShapeError("tabular policy: action out of range");
  const Vec lp = log_probabilities(s);
  const Eigen::Index base = s * logits_.cols();
  for (Eigen::Index k = 0; k < logits_.cols(); ++k) {
    grad[base + k] += scale * ((k == a ? 1.0 : 0.0) - std::exp(lp[k]));
  }
  return lp[a];
}

void TabularValueModel::set_params(const ParamVector& params) {
  if (params.size() != values_.size()) throw ShapeError("tabular value: wrong parameter count");
  values_ = params;
}

int TabularValueModel::state_of(const Vec& obs) const { return one_hot_index(obs, values_.size()); }

double TabularValueModel::value(const Vec& obs) const { return values_[state_of(obs)]; }

double TabularValueModel::value_accumulate(const Vec& obs, double scale, Eigen::Ref<ParamVector> grad) const {
  const int s = state_of(obs);
  grad[s] += scale;
  return values_[s];
}

}  // namespace trustpcl::oracle

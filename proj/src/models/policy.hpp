#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include "common/types.hpp"

namespace trustpcl::models {

/// Stochastic policy with an exact log-density and parameter gradient.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::unique_ptr<Policy> clone() const = 0;
  virtual std::string kind() const = 0;
  virtual int observation_dim() const = 0;
  virtual std::size_t num_params() const = 0;
  virtual ParamVector params() const = 0;
  virtual void set_params(const ParamVector& params) = 0;

  virtual Action sample(const Vec& obs, Rng& rng) const = 0;
  virtual Action greedy(const Vec& obs) const = 0;

  virtual double log_density(const Vec& obs, const Action& action) const = 0;
  /// Returns log pi(action|obs) and adds `scale` times its parameter gradient into `grad`.
  virtual double log_density_accumulate(const Vec& obs, const Action& action, double scale,
                                        Eigen::Ref<ParamVector> grad) const = 0;

  /// log pi(action|obs) and its full parameter gradient.
  double log_density_with_grad(const Vec& obs, const Action& action, ParamVector& grad) const {
    grad = ParamVector::Zero(static_cast<Eigen::Index>(num_params()));
    return log_density_accumulate(obs, action, 1.0, grad);
  }
};

class ValueFunction {
 public:
  virtual ~ValueFunction() = default;

  virtual std::unique_ptr<ValueFunction> clone() const = 0;
  virtual int observation_dim() const = 0;
  virtual std::size_t num_params() const = 0;
  virtual ParamVector params() const = 0;
  virtual void set_params(const ParamVector& params) = 0;

  virtual double value(const Vec& obs) const = 0;
  virtual double value_accumulate(const Vec& obs, double scale, Eigen::Ref<ParamVector> grad) const = 0;

  double value_with_grad(const Vec& obs, ParamVector& grad) const {
    grad = ParamVector::Zero(static_cast<Eigen::Index>(num_params()));
    return value_accumulate(obs, 1.0, grad);
  }
};

}  // namespace trustpcl::models

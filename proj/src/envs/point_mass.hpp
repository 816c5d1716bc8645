#pragma once

#include "envs/env.hpp"

namespace trustpcl::envs {

/// 2-D point mass driven toward the origin. Observation is the position
/// followed by the goal offset (goal - position).
class PointMass final : public Environment {
 public:
  static constexpr double kStepScale = 0.1;
  static constexpr double kActionCost = 0.01;
  static constexpr double kGoalRadius = 0.05;
  static constexpr double kPositionBound = 2.0;

  explicit PointMass(int max_steps = 100) : max_steps_(max_steps) {}

  std::unique_ptr<Environment> clone() const override { return std::make_unique<PointMass>(*this); }
  std::string id() const override { return "point_mass"; }
  EnvSpec spec() const override;
  Vec reset(std::uint64_t seed) override;
  StepResult step(const Action& action) override;

  /// Places the mass at `position` and starts a fresh episode.
  void set_position(const Eigen::Vector2d& position);
  const Eigen::Vector2d& position() const { return position_; }
  Vec observation() const;

 private:
  int max_steps_;
  Eigen::Vector2d position_ = Eigen::Vector2d::Zero();
  Eigen::Vector2d goal_ = Eigen::Vector2d::Zero();
  int steps_ = 0;
  bool active_ = false;
};

}  // namespace trustpcl::envs

#include "envs/point_mass.hpp"

#include "common/error.hpp"

namespace trustpcl::envs {

EnvSpec PointMass::spec() const {
  EnvSpec s;
  s.observation_dim = 4;
  s.action_kind = ActionKind::kContinuous;
  s.action_dim = 2;
  s.action_low = Vec::Constant(2, -1.0);
  s.action_high = Vec::Constant(2, 1.0);
  s.observation_low = Vec::Constant(4, -2.0 * kPositionBound);
  s.observation_low.head(2).setConstant(-kPositionBound);
  s.observation_high = -s.observation_low;
  s.max_steps = max_steps_;
  return s;
}

Vec PointMass::observation() const {
  Vec obs(4);
  obs << position_, goal_ - position_;
  return obs;
}

Vec PointMass::reset(std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double x = u(rng);
  const double y = u(rng);
  set_position({x, y});
  return observation();
}

void PointMass::set_position(const Eigen::Vector2d& position) {
  position_ = position;
  steps_ = 0;
  active_ = true;
}

StepResult PointMass::step(const Action& action) {
  if (!active_) throw UsageError("point_mass: step called without an active episode");
  if (action.size() != 2) throw ShapeError("point_mass: action must have 2 entries");
  const Eigen::Vector2d a = action.cwiseMax(-1.0).cwiseMin(1.0);
  position_ = (position_ + kStepScale * a).cwiseMax(-kPositionBound).cwiseMin(kPositionBound);
  ++steps_;
  StepResult r;
  const double dist2 = (position_ - goal_).squaredNorm();
  r.reward = -(dist2 + kActionCost * a.squaredNorm());
  r.terminal = std::sqrt(dist2) < kGoalRadius;
  r.timeout = !r.terminal && steps_ >= max_steps_;
  r.observation = observation();
  if (r.terminal || r.timeout) active_ = false;
  return r;
}

}  // namespace trustpcl::envs

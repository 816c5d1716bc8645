#include "envs/pendulum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "common/error.hpp"

namespace trustpcl::envs {

double wrap_angle(double angle) {
  const double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(angle + std::numbers::pi, two_pi);
  if (w < 0.0) w += two_pi;
  return w - std::numbers::pi;
}

EnvSpec Pendulum::spec() const {
  EnvSpec s;
  s.observation_dim = 3;
  s.action_kind = ActionKind::kContinuous;
  s.action_dim = 1;
  s.action_low = Vec::Constant(1, -kMaxTorque);
  s.action_high = Vec::Constant(1, kMaxTorque);
  s.observation_low = Vec(3);
  s.observation_low << -1.0, -1.0, -kMaxSpeed;
  s.observation_high = -s.observation_low;
  s.max_steps = max_steps_;
  return s;
}

Vec Pendulum::observation() const {
  Vec obs(3);
  obs << std::cos(angle_), std::sin(angle_), velocity_;
  return obs;
}

void Pendulum::set_state(double angle, double velocity) {
  angle_ = angle;
  velocity_ = velocity;
  steps_ = 0;
  active_ = true;
}

Vec Pendulum::reset(std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> speed(-1.0, 1.0);
  const double th = angle(rng);
  const double om = speed(rng);
  set_state(th, om);
  return observation();
}

StepResult Pendulum::step(const Action& action) {
  if (!active_) throw UsageError("pendulum: step called without an active episode");
  if (action.size() != 1) throw ShapeError("pendulum: action must have 1 entry");
  const double u = std::clamp(action[0], -kMaxTorque, kMaxTorque);
  const double th = wrap_angle(angle_);
  StepResult r;
  r.reward = -(th * th + 0.1 * velocity_ * velocity_ + 0.001 * u * u);

  const double accel = 3.0 * kGravity / (2.0 * kLength) * std::sin(angle_) + 3.0 / (kMass * kLength * kLength) * u;
  velocity_ = std::clamp(velocity_ + accel * kDt, -kMaxSpeed, kMaxSpeed);
  angle_ = wrap_angle(angle_ + velocity_ * kDt);
  ++steps_;

  r.terminal = false;
  r.timeout = steps_ >= max_steps_;
  r.observation = observation();
  if (r.timeout) active_ = false;
  return r;
}

}  // namespace trustpcl::envs

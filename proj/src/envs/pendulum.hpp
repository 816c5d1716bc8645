#pragma once

#include "envs/env.hpp"

namespace trustpcl::envs {

/// Torque-limited pendulum swing-up; angle 0 is upright.
/// Observation is (cos angle, sin angle, angular velocity).
class Pendulum final : public Environment {
 public:
  static constexpr double kGravity = 10.0;
  static constexpr double kMass = 1.0;
  static constexpr double kLength = 1.0;
  static constexpr double kDt = 0.05;
  static constexpr double kMaxTorque = 2.0;
  static constexpr double kMaxSpeed = 8.0;

  explicit Pendulum(int max_steps = 200) : max_steps_(max_steps) {}

  std::unique_ptr<Environment> clone() const override { return std::make_unique<Pendulum>(*this); }
  std::string id() const override { return "pendulum"; }
  EnvSpec spec() const override;
  Vec reset(std::uint64_t seed) override;
  StepResult step(const Action& action) override;

  void set_state(double angle, double velocity);
  double angle() const { return angle_; }
  double velocity() const { return velocity_; }
  Vec observation() const;

 private:
  int max_steps_;
  double angle_ = 0.0;
  double velocity_ = 0.0;
  int steps_ = 0;
  bool active_ = false;
};

/// Wraps an angle into [-pi, pi).
double wrap_angle(double angle);

}  // namespace trustpcl::envs

#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "consistency/consistency.hpp"
#include "envs/env.hpp"
#include "models/networks.hpp"
#include "nn/adam.hpp"
#include "replay/replay.hpp"
#include "trainer/config.hpp"
#include "trust/lag.hpp"
#include "trust/lambda.hpp"

namespace trustpcl::trainer {

struct TrainMetricsRow {
  std::int64_t iteration = 0;
  std::int64_t env_steps = 0;
  double eval_return = 0.0;
  double lambda = 0.0;
  double kl_estimate = 0.0;
  double kl_target = 0.0;
  double loss = 0.0;
  double tau = 0.0;
  double seconds = 0.0;
};

inline constexpr const char* kMetricsHeader = "iteration,env_steps,eval_return,lambda,kl_estimate,kl_target,loss,tau,seconds";
std::string format_metrics_row(const TrainMetricsRow& row);
void write_metrics_csv(const std::string& path, const std::vector<TrainMetricsRow>& rows);

/// Episode in progress across collection calls.
struct CollectorState {
  bool active = false;
  Vec observation;
  std::uint64_t episode_id = 0;
  int step_index = 0;
  double episode_return = 0.0;
  std::uint64_t episodes_started = 0;
};

struct CollectResult {
  std::vector<replay::Segment> segments;
  std::vector<replay::EpisodeRecord> completed;
};

/// Samples `steps` actions from `policy` on `env`, resetting after a terminal
/// or timeout. Emits one segment per contiguous episode piece. Episode reset
/// seeds come from derive_seed(seed, ...) with the low bit cleared.
CollectResult collect(envs::Environment& env, const models::Policy& policy, int steps, CollectorState& state,
                      std::uint64_t seed, Rng& rng);

/// Mean undiscounted return of `episodes` greedy rollouts. Reset seeds have
/// the low bit set, so they never coincide with training resets.
double evaluate(const envs::Environment& env, const models::Policy& policy, int episodes, std::uint64_t seed);

/// Reset seed for the k-th training episode / evaluation episode of a run.
std::uint64_t train_episode_seed(std::uint64_t seed, std::uint64_t k);
std::uint64_t eval_episode_seed(std::uint64_t seed, std::uint64_t k);

class Trainer {
 public:
  Trainer(TrainConfig config, std::uint64_t seed);

  /// One collect / train / update-auxiliaries round.
  void train_iteration();
  /// Runs the configured number of iterations, evaluating every
  /// eval.interval iterations and after the last one.
  const std::vector<TrainMetricsRow>& run();

  double evaluate_greedy(int episodes) const;
  TrainMetricsRow snapshot_row(double eval_return) const;

  const TrainConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }
  std::int64_t iteration() const { return iteration_; }
  std::int64_t env_steps() const { return env_steps_; }
  double lambda() const { return lambda_; }
  double tau() const { return tau_; }
  double last_loss() const { return last_loss_; }
  bool trained_last_iteration() const { return trained_last_; }
  const std::vector<TrainMetricsRow>& metrics() const { return metrics_; }

  models::Policy& policy() { return *policy_; }
  const models::Policy& policy() const { return *policy_; }
  models::ValueNet& value() { return *value_; }
  const models::ValueNet& value() const { return *value_; }
  const models::Policy& lagged_policy() const { return *lagged_policy_; }
  const models::ValueNet& lagged_value() const { return *lagged_value_; }
  const replay::ReplayBuffer& buffer() const { return buffer_; }
  const replay::EpisodeLog& episode_log() const { return log_; }
  const envs::Environment& env() const { return *env_; }

  void save_checkpoint(const std::string& path) const;

 private:
  void gradient_step();
  void update_lambda();

  TrainConfig config_;
  std::uint64_t seed_;
  std::unique_ptr<envs::Environment> env_;
  envs::EnvSpec spec_;
  std::unique_ptr<models::Policy> policy_;
  std::unique_ptr<models::ValueNet> value_;
  std::unique_ptr<models::Policy> lagged_policy_;
  std::unique_ptr<models::ValueNet> lagged_value_;
  std::unique_ptr<models::Policy> uniform_reference_;
  trust::LagState lag_;
  nn::AdamState adam_policy_;
  nn::AdamState adam_value_;
  replay::ReplayBuffer buffer_;
  replay::EpisodeLog log_;
  trust::LambdaSolver solver_;
  CollectorState collector_;
  Rng rng_;

  std::int64_t iteration_ = 0;
  std::int64_t env_steps_ = 0;
  double lambda_ = 0.0;
  double tau_ = 0.0;
  double last_loss_ = 0.0;
  double last_kl_ = 0.0;
  double last_target_ = 0.0;
  bool trained_last_ = false;
  std::vector<TrainMetricsRow> metrics_;
  std::chrono::steady_clock::time_point started_;
};

/// Builds a trainer from `config` and runs it to completion.
std::vector<TrainMetricsRow> run(const TrainConfig& config, std::uint64_t seed);

}  // namespace trustpcl::trainer

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace trustpcl::trainer {

enum class LambdaMode { kAuto, kFixed };
enum class TauSchedule { kConstant, kDecay };
enum class ReferenceKind { kLagged, kUniform };

struct TrainConfig {
  std::string env = "point_mass";
  double epsilon = 0.01;  // +inf disables the relative-entropy term (lambda = 0)
  LambdaMode lambda_mode = LambdaMode::kAuto;
  double lambda_value = 1.0;  // fixed value, or the starting value in auto mode
  double lambda_min = 1e-4;
  double lambda_max = 1e4;
  int rollout = 10;
  double gamma = 0.995;
  int collect_steps = 10;       // P
  int batch_transitions = 64;   // Q
  double lag_alpha = 0.99;
  double replay_beta = 0.001;
  int replay_capacity = 5000;
  double lr_policy = 1e-4;
  double lr_value = 1e-4;
  TauSchedule tau_schedule = TauSchedule::kDecay;
  double tau_initial = 0.1;
  double tau_decay_factor = 0.1;
  double tau_decay_interval = 2500;
  std::int64_t train_steps = 20000;  // N
  int eval_interval = 500;
  int eval_episodes = 10;
  int value_steps = 1;
  double huber_delta = 1.0;
  ReferenceKind reference = ReferenceKind::kLagged;
  double init_log_std = 0.0;
  std::vector<int> hidden{64, 64};
  bool wall_clock = false;

  /// Throws ConfigError naming the offending key.
  void validate() const;
  /// tau at iteration k.
  double tau_at(std::int64_t iteration) const;
  bool pcl_limit() const;  // epsilon = inf
};

/// Known preset names: "off_policy" (the default), "on_policy", "chain_tabular".
TrainConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// Sets one dotted key from its text form. Unknown keys and malformed values
/// throw ConfigError naming the key.
void set_key(TrainConfig& cfg, const std::string& key, const std::string& value);
std::string get_key(const TrainConfig& cfg, const std::string& key);
std::vector<std::string> known_keys();

/// Flat text form, one `key = value` per line in a fixed key order, every
/// default materialized.
std::string serialize(const TrainConfig& cfg);
/// Parses the flat text form on top of `base`. `#` starts a comment. A
/// `preset = name` line, if present, must come first and resets the base.
TrainConfig parse(const std::string& text, const TrainConfig& base = {});
TrainConfig load_config(const std::string& path);

/// git-style blob hash (SHA-1 of "blob <len>\0<text>") of the serialized config.
std::string config_hash(const TrainConfig& cfg);
std::string git_blob_sha1(const std::string& content);

std::string format_double(double x);

}  // namespace trustpcl::trainer

#include "trainer/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "common/error.hpp"
#include "models/serialize.hpp"

namespace trustpcl::trainer {

namespace {

constexpr std::uint64_t kTrainEnvStream = 0x7261696e;  // "rain"
constexpr std::uint64_t kEvalEnvStream = 0x6576616c;   // "eval"
constexpr std::uint64_t kInitStream = 0x696e6974;      // "init"
constexpr std::uint64_t kSampleStream = 0x73616d70;    // "samp"

}  // namespace

std::uint64_t train_episode_seed(std::uint64_t seed, std::uint64_t k) {
  return derive_seed(seed, kTrainEnvStream, k) & ~std::uint64_t{1};
}

std::uint64_t eval_episode_seed(std::uint64_t seed, std::uint64_t k) {
  return derive_seed(seed, kEvalEnvStream, k) | std::uint64_t{1};
}

std::string format_metrics_row(const TrainMetricsRow& r) {
  return std::to_string(r.iteration) + "," + std::to_string(r.env_steps) + "," + format_double(r.eval_return) + "," +
         format_double(r.lambda) + "," + format_double(r.kl_estimate) + "," + format_double(r.kl_target) + "," +
         format_double(r.loss) + "," + format_double(r.tau) + "," + format_double(r.seconds);
}

void write_metrics_csv(const std::string& path, const std::vector<TrainMetricsRow>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write metrics file " + path);
  out << kMetricsHeader << '\n';
  for (const auto& r : rows) out << format_metrics_row(r) << '\n';
}

CollectResult collect(envs::Environment& env, const models::Policy& policy, int steps, CollectorState& state,
                      std::uint64_t seed, Rng& rng) {
  CollectResult out;
  replay::Segment current;
  bool open = false;
  for (int k = 0; k < steps; ++k) {
    if (!state.active) {
      state.observation = env.reset(train_episode_seed(seed, state.episodes_started));
      state.episode_id = state.episodes_started++;
      state.step_index = 0;
      state.episode_return = 0.0;
      state.active = true;
    }
    if (!open) {
      current = replay::Segment{};
      current.episode_id = state.episode_id;
      current.start_index = state.step_index;
      open = true;
    }
    const Action action = policy.sample(state.observation, rng);
    const envs::StepResult r = env.step(action);
    replay::Transition t;
    t.observation = state.observation;
    t.action = action;
    t.reward = r.reward;
    t.log_prob = policy.log_density(state.observation, action);
    t.terminal = r.terminal;
    t.timeout = r.timeout;
    current.transitions.push_back(std::move(t));
    state.episode_return += r.reward;
    state.step_index += 1;
    state.observation = r.observation;
    if (r.terminal || r.timeout) {
      current.next_observation = r.observation;
      out.segments.push_back(std::move(current));
      out.completed.push_back({state.episode_return, state.step_index});
      state.active = false;
      open = false;
    }
  }
  if (open) {
    current.next_observation = state.observation;
    out.segments.push_back(std::move(current));
  }
  return out;
}

double evaluate(const envs::Environment& env, const models::Policy& policy, int episodes, std::uint64_t seed) {
  if (episodes < 1) throw UsageError("evaluate: need at least one episode");
  auto sim = env.clone();
  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    Vec obs = sim->reset(eval_episode_seed(seed, static_cast<std::uint64_t>(e)));
    while (true) {
      const envs::StepResult r = sim->step(policy.greedy(obs));
      total += r.reward;
      obs = r.observation;
      if (r.terminal || r.timeout) break;
    }
  }
  return total / episodes;
}

Trainer::Trainer(TrainConfig config, std::uint64_t seed)
    : config_(std::move(config)),
      seed_(seed),
      buffer_(static_cast<std::size_t>(std::max(config_.replay_capacity, 1)), std::max(config_.replay_beta, 0.0)),
      rng_(derive_seed(seed, kSampleStream, 0)) {
  config_.validate();
  env_ = envs::make_env(config_.env);
  spec_ = env_->spec();

  Rng init(derive_seed(seed, kInitStream, 0));
  if (spec_.action_kind == envs::ActionKind::kContinuous) {
    auto p = std::make_unique<models::GaussianPolicy>(spec_.observation_dim, spec_.action_dim, config_.hidden);
    p->initialize(init, config_.init_log_std);
    policy_ = std::move(p);
  } else {
    auto p = std::make_unique<models::CategoricalPolicy>(spec_.observation_dim, spec_.num_actions, config_.hidden);
    p->initialize(init);
    policy_ = std::move(p);
    uniform_reference_ = std::make_unique<models::UniformPolicy>(spec_.observation_dim, spec_.num_actions);
  }
  if (config_.reference == ReferenceKind::kUniform && !uniform_reference_) {
    throw ConfigError("invalid value for 'reference': uniform needs a discrete-action env");
  }
  value_ = std::make_unique<models::ValueNet>(spec_.observation_dim, config_.hidden);
  value_->initialize(init);
  lagged_policy_ = policy_->clone();
  lagged_value_ = std::make_unique<models::ValueNet>(*value_);
  lag_ = {policy_->params(), value_->params(), config_.lag_alpha};
  adam_policy_ = nn::AdamState::fresh(static_cast<Eigen::Index>(policy_->num_params()), config_.lr_policy);
  adam_value_ = nn::AdamState::fresh(static_cast<Eigen::Index>(value_->num_params()), config_.lr_value);

  solver_.lambda_min = config_.lambda_min;
  solver_.lambda_max = config_.lambda_max;
  solver_.lambda = std::clamp(config_.lambda_value, config_.lambda_min, config_.lambda_max);
  if (config_.pcl_limit()) {
    lambda_ = 0.0;
  } else if (config_.lambda_mode == LambdaMode::kFixed) {
    lambda_ = config_.lambda_value;
  } else {
    lambda_ = solver_.lambda;
  }
  tau_ = config_.tau_at(0);
  started_ = std::chrono::steady_clock::now();
}

void Trainer::gradient_step() {
  const auto batch = buffer_.sample_batch(config_.batch_transitions, config_.collect_steps, rng_);
  consistency::ConsistencyConfig cc;
  cc.rollout = config_.rollout;
  cc.gamma = config_.gamma;
  cc.tau = tau_;
  cc.lambda = lambda_;
  cc.huber_delta = config_.huber_delta;
  const models::Policy& reference =
      config_.reference == ReferenceKind::kUniform ? *uniform_reference_ : *lagged_policy_;

  auto result = consistency::batch_loss_and_grads(batch, {*policy_, *value_, *lagged_value_, reference}, cc);
  last_loss_ = result.loss;

  ParamVector theta = policy_->params();
  nn::adam_step(adam_policy_, theta, result.grad_policy);
  ParamVector phi = value_->params();
  nn::adam_step(adam_value_, phi, result.grad_value);
  value_->set_params(phi);
  for (int k = 1; k < config_.value_steps; ++k) {
    result = consistency::batch_loss_and_grads(batch, {*policy_, *value_, *lagged_value_, reference}, cc, false);
    nn::adam_step(adam_value_, phi, result.grad_value);
    value_->set_params(phi);
  }
  policy_->set_params(theta);
}

void Trainer::update_lambda() {
  const auto stats = log_.stats(2);
  last_target_ = config_.pcl_limit() ? std::numeric_limits<double>::infinity()
                                     : (stats ? config_.epsilon * stats->mean_length : 0.0);
  if (config_.pcl_limit()) {
    lambda_ = 0.0;
  } else if (config_.lambda_mode == LambdaMode::kFixed) {
    lambda_ = config_.lambda_value;
  } else {
    lambda_ = trust::solve_lambda(log_, config_.epsilon, solver_).lambda;
  }
  last_kl_ = (stats && lambda_ > 0.0) ? trust::estimate_kl(stats->returns, lambda_).kl : 0.0;
}

void Trainer::train_iteration() {
  try {
    // Collect.
    auto collected = collect(*env_, *policy_, config_.collect_steps, collector_, seed_, rng_);
    for (auto& seg : collected.segments) buffer_.insert(std::move(seg), iteration_);
    for (const auto& ep : collected.completed) log_.log_episode(ep.total_return, ep.length);
    env_steps_ += config_.collect_steps;

    // Train, once there is a full batch of data and two finished episodes.
    trained_last_ = buffer_.total_transitions() >= static_cast<std::size_t>(config_.batch_transitions) &&
                    log_.size() >= 2;
    if (trained_last_) gradient_step();

    // Auxiliary variables.
    lag_ = trust::update_lag(lag_, policy_->params(), value_->params());
    lagged_policy_->set_params(lag_.policy);
    lagged_value_->set_params(lag_.value);
    update_lambda();
    ++iteration_;
    tau_ = config_.tau_at(iteration_);
  } catch (const NumericError& e) {
    throw NumericError("iteration " + std::to_string(iteration_) + ": " + e.what());
  }
}

double Trainer::evaluate_greedy(int episodes) const { return evaluate(*env_, *policy_, episodes, seed_); }

TrainMetricsRow Trainer::snapshot_row(double eval_return) const {
  TrainMetricsRow row;
  row.iteration = iteration_;
  row.env_steps = env_steps_;
  row.eval_return = eval_return;
  row.lambda = lambda_;
  row.kl_estimate = last_kl_;
  row.kl_target = last_target_;
  row.loss = last_loss_;
  row.tau = tau_;
  if (config_.wall_clock) {
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
  }
  return row;
}

const std::vector<TrainMetricsRow>& Trainer::run() {
  while (iteration_ < config_.train_steps) {
    train_iteration();
    if (iteration_ % config_.eval_interval == 0 || iteration_ == config_.train_steps) {
      metrics_.push_back(snapshot_row(evaluate_greedy(config_.eval_episodes)));
    }
  }
  return metrics_;
}

void Trainer::save_checkpoint(const std::string& path) const { models::save_checkpoint(path, *policy_, *value_); }

std::vector<TrainMetricsRow> run(const TrainConfig& config, std::uint64_t seed) {
  Trainer t(config, seed);
  return t.run();
}

}  // namespace trustpcl::trainer

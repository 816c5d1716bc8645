#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "common/error.hpp"
#include "envs/chain.hpp"
#include "envs/point_mass.hpp"
#include "models/networks.hpp"
#include "trainer/config.hpp"
#include "trainer/manifest.hpp"
#include "trainer/trainer.hpp"

using namespace trustpcl;
using namespace trustpcl::trainer;

namespace {

TrainConfig small_config() {
  TrainConfig c;
  c.hidden = {8};
  c.collect_steps = 10;
  c.batch_transitions = 40;
  c.train_steps = 30;
  c.eval_interval = 10;
  c.eval_episodes = 2;
  c.lr_policy = 1e-3;
  c.lr_value = 1e-3;
  return c;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

// Ignores the observation and always plays the same action.
class FixedAction final : public models::Policy {
 public:
  explicit FixedAction(Action a) : a_(std::move(a)) {}
  std::unique_ptr<models::Policy> clone() const override { return std::make_unique<FixedAction>(*this); }
  std::string kind() const override { return "fixed"; }
  int observation_dim() const override { return 0; }
  std::size_t num_params() const override { return 0; }
  ParamVector params() const override { return {}; }
  void set_params(const ParamVector&) override {}
  Action sample(const Vec&, Rng&) const override { return a_; }
  Action greedy(const Vec&) const override { return a_; }
  double log_density(const Vec&, const Action&) const override { return 0.0; }
  double log_density_accumulate(const Vec&, const Action&, double, Eigen::Ref<ParamVector>) const override {
    return 0.0;
  }

 private:
  Action a_;
};

}  // namespace

TEST_SUITE("trainer") {
  TEST_CASE("config: presets, keys and validation messages") {
    const TrainConfig d = preset("off_policy");
    CHECK(d.gamma == 0.995);
    CHECK(d.collect_steps == 10);
    CHECK(d.batch_transitions == 64);
    CHECK(d.lag_alpha == 0.99);
    CHECK(d.replay_beta == 0.001);
    const TrainConfig on = preset("on_policy");
    CHECK(on.lag_alpha == 0.95);
    CHECK(on.replay_beta == 0.1);
    CHECK(on.collect_steps == 1000);
    CHECK(on.batch_transitions == 25000);
    CHECK_THROWS_AS(preset("nope"), ConfigError);

    TrainConfig c;
    set_key(c, "epsilon", "inf");
    CHECK(c.pcl_limit());
    set_key(c, "network.hidden", "16,4");
    CHECK(c.hidden == std::vector<int>{16, 4});
    CHECK(get_key(c, "network.hidden") == "16,4");
    CHECK(message_of([&] { set_key(c, "bogus.key", "1"); }).find("bogus.key") != std::string::npos);
    CHECK(message_of([&] { set_key(c, "rollout", "ten"); }).find("rollout") != std::string::npos);

    TrainConfig bad;
    bad.epsilon = -1.0;
    CHECK(message_of([&] { bad.validate(); }).find("epsilon") != std::string::npos);
    bad = {};
    bad.batch_transitions = 5;
    CHECK(message_of([&] { bad.validate(); }).find("batch_transitions") != std::string::npos);
    bad = {};
    bad.gamma = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = {};
    bad.lag_alpha = 1.0;
    CHECK_NOTHROW(bad.validate());
  }

  TEST_CASE("config: tau schedule") {
    TrainConfig c;
    CHECK(c.tau_at(0) == doctest::Approx(0.1));
    CHECK(c.tau_at(2500) == doctest::Approx(0.01));
    CHECK(c.tau_at(1250) == doctest::Approx(0.1 * std::sqrt(0.1)));
    c.tau_schedule = TauSchedule::kConstant;
    c.tau_initial = 0.0;
    CHECK(c.tau_at(10000) == 0.0);
  }

  TEST_CASE("config: text round trip and hash") {
    TrainConfig c = preset("chain_tabular");
    c.epsilon = 0.002;
    const std::string text = serialize(c);
    const TrainConfig back = parse(text);
    CHECK(serialize(back) == text);
    CHECK(config_hash(back) == config_hash(c));
    CHECK(config_hash(c).size() == 40);
    CHECK(git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    TrainConfig other = c;
    other.rollout = 11;
    CHECK(config_hash(other) != config_hash(c));

    const TrainConfig p = parse("preset = on_policy\n# comment\nrollout = 7  # trailing\n");
    CHECK(p.collect_steps == 1000);
    CHECK(p.rollout == 7);
    CHECK_THROWS_AS(parse("rollout = 3\npreset = on_policy\n"), ConfigError);
    CHECK_THROWS_AS(parse("rollout 3\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/file.conf"), IoError);
  }

  TEST_CASE("manifest round trip and tamper detection") {
    const RunManifest m = RunManifest::make(preset("off_policy"), {3, 1, 2});
    CHECK(m.metrics_file(3) == "metrics_seed3.csv");
    CHECK(m.checkpoint_file(2) == "checkpoint_seed2.json");
    const std::string json = manifest_to_json(m);
    const RunManifest back = manifest_from_json(json);
    CHECK(back.seeds == m.seeds);
    CHECK(back.config_hash == m.config_hash);
    CHECK(serialize(back.config) == serialize(m.config));

    std::string tampered = json;
    const auto pos = tampered.find("rollout = 10");
    REQUIRE(pos != std::string::npos);
    tampered.replace(pos, 12, "rollout = 12");
    CHECK_THROWS_AS(manifest_from_json(tampered), ConfigError);
  }

  TEST_CASE("collect: one piece in an endless stretch") {
    envs::ChainEnv env(oracle::default_chain());
    const FixedAction right(discrete_action(1));
    CollectorState state;
    Rng rng(1);
    const auto out = collect(env, right, 10, state, 5, rng);
    REQUIRE(out.segments.size() == 1);
    CHECK(out.segments[0].length() == 10);
    CHECK(out.completed.empty());
    CHECK(out.segments[0].next_observation == state.observation);
  }

  TEST_CASE("collect: splits at a terminal and resets") {
    envs::PointMass env;
    env.set_position({0.5, 0.0});
    CollectorState state;
    state.active = true;
    state.observation = env.observation();
    state.episodes_started = 1;
    const FixedAction push((Action(2) << -1.0, 0.0).finished());
    Rng rng(2);
    const auto out = collect(env, push, 10, state, 9, rng);
    // 0.5 -> 0.4 -> 0.3 -> 0.2 -> 0.1 -> 0.0 reaches the goal on step 5.
    REQUIRE(out.segments.size() == 2);
    CHECK(out.segments[0].length() == 5);
    CHECK(out.segments[0].transitions.back().terminal);
    CHECK(out.segments[1].length() == 5);
    CHECK(out.segments[1].start_index == 0);
    CHECK(out.segments[1].episode_id != out.segments[0].episode_id);
    REQUIRE(out.completed.size() == 1);
    CHECK(out.completed[0].length == 5);
  }

  TEST_CASE("collect and evaluate are deterministic") {
    const TrainConfig cfg = small_config();
    Trainer t(cfg, 4);
    envs::PointMass a, b;
    CollectorState sa, sb;
    Rng ra(3), rb(3);
    const auto oa = collect(a, t.policy(), 25, sa, 7, ra);
    const auto ob = collect(b, t.policy(), 25, sb, 7, rb);
    REQUIRE(oa.segments.size() == ob.segments.size());
    for (std::size_t i = 0; i < oa.segments.size(); ++i) {
      for (int k = 0; k < oa.segments[i].length(); ++k) {
        CHECK(oa.segments[i].transitions[k].action == ob.segments[i].transitions[k].action);
      }
    }
    CHECK(evaluate(a, t.policy(), 3, 11) == evaluate(b, t.policy(), 3, 11));
    CHECK_THROWS_AS(evaluate(a, t.policy(), 0, 11), UsageError);
    CHECK((train_episode_seed(5, 3) & 1u) == 0u);
    CHECK((eval_episode_seed(5, 3) & 1u) == 1u);
  }

  TEST_CASE("greedy evaluation of a deterministic controller has no variance") {
    envs::ChainEnv env(oracle::default_chain());
    const FixedAction right(discrete_action(1));
    const double one = evaluate(env, right, 1, 0);
    CHECK(evaluate(env, right, 5, 0) == one);
    CHECK(one == 15.0);  // five steps to the end, then fifteen rewards of 1
  }

  TEST_CASE("run: row counts and step accounting") {
    TrainConfig cfg = small_config();
    cfg.train_steps = 0;
    CHECK(Trainer(cfg, 1).run().empty());

    cfg.train_steps = 5;
    cfg.eval_interval = 1;
    Trainer t(cfg, 1);
    const auto& rows = t.run();
    REQUIRE(rows.size() == 5);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].iteration == static_cast<std::int64_t>(i + 1));
      CHECK(rows[i].env_steps == rows[i].iteration * cfg.collect_steps);
      CHECK(rows[i].seconds == 0.0);
    }
  }

  TEST_CASE("run: lambda within bounds and KL non-negative") {
    TrainConfig cfg = small_config();
    cfg.env = "chain";
    cfg.epsilon = 0.005;
    cfg.train_steps = 60;
    Trainer t(cfg, 2);
    for (const auto& r : t.run()) {
      CHECK(r.lambda >= cfg.lambda_min);
      CHECK(r.lambda <= cfg.lambda_max);
      CHECK(r.kl_estimate >= -1e-10);
    }
    CHECK(t.trained_last_iteration());
  }

  TEST_CASE("zero learning rates freeze parameters but not lambda") {
    TrainConfig cfg = small_config();
    cfg.lr_policy = 0.0;
    cfg.lr_value = 0.0;
    cfg.train_steps = 40;
    Trainer t(cfg, 3);
    const ParamVector theta = t.policy().params();
    const ParamVector phi = t.value().params();
    const double lambda0 = t.lambda();
    t.run();
    CHECK(t.trained_last_iteration());
    CHECK(t.policy().params() == theta);
    CHECK(t.value().params() == phi);
    CHECK(t.lambda() != lambda0);
  }

  TEST_CASE("lag of one freezes the prior") {
    TrainConfig cfg = small_config();
    cfg.lag_alpha = 1.0;
    Trainer t(cfg, 4);
    const ParamVector prior = t.lagged_policy().params();
    t.run();
    CHECK(t.policy().params() != prior);
    CHECK(t.lagged_policy().params() == prior);
  }

  TEST_CASE("same config and seed give identical metrics files") {
    const TrainConfig cfg = small_config();
    const auto dir = std::filesystem::temp_directory_path() / "trustpcl_trainer_det";
    std::filesystem::create_directories(dir);
    for (const char* name : {"a.csv", "b.csv"}) {
      Trainer t(cfg, 9);
      write_metrics_csv((dir / name).string(), t.run());
    }
    const std::string a = read_file(dir / "a.csv");
    CHECK(a == read_file(dir / "b.csv"));
    CHECK(a.rfind(std::string(kMetricsHeader) + "\n", 0) == 0);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("numeric failure names the iteration") {
    TrainConfig cfg = small_config();
    cfg.lr_policy = 1e300;
    cfg.lr_value = 1e300;
    cfg.train_steps = 100;
    Trainer t(cfg, 5);
    const std::string msg = message_of([&] { t.run(); });
    CHECK(msg.find("iteration") != std::string::npos);
  }

  TEST_CASE("uniform reference needs a discrete env") {
    TrainConfig cfg = small_config();
    cfg.reference = ReferenceKind::kUniform;
    CHECK_THROWS_AS(Trainer(cfg, 1), ConfigError);
    cfg.env = "chain";
    CHECK_NOTHROW(Trainer(cfg, 1));
  }

  TEST_CASE("on-policy preset trains on point mass") {
    // Full hyperparameters with a shortened budget: the first 25 iterations
    // fill the 25k-transition batch, the remaining ones take gradient steps.
    TrainConfig cfg = preset("on_policy");
    cfg.train_steps = 28;
    Trainer t(cfg, 1);
    const auto& rows = t.run();
    CHECK(t.trained_last_iteration());
    REQUIRE_FALSE(rows.empty());
    CHECK(rows.back().env_steps == 28000);
    CHECK(std::isfinite(rows.back().eval_return));
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <trustpcl/trustpcl.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  tpcl_string_free(s);
  return out;
}

std::filesystem::path scratch(const char* name) {
  const auto dir = std::filesystem::temp_directory_path() / "trustpcl_capi";
  std::filesystem::create_directories(dir);
  return dir / name;
}

tpcl_config* small_config() {
  tpcl_config* cfg = nullptr;
  REQUIRE(tpcl_config_create("off_policy", &cfg) == TPCL_OK);
  REQUIRE(tpcl_config_set(cfg, "network.hidden", "8") == TPCL_OK);
  REQUIRE(tpcl_config_set(cfg, "batch_transitions", "40") == TPCL_OK);
  REQUIRE(tpcl_config_set(cfg, "train_steps", "12") == TPCL_OK);
  REQUIRE(tpcl_config_set(cfg, "eval.interval", "4") == TPCL_OK);
  REQUIRE(tpcl_config_set(cfg, "eval.episodes", "2") == TPCL_OK);
  return cfg;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(tpcl_version()).size() > 0);
  CHECK(std::string(tpcl_status_name(TPCL_OK)) == "ok");
  CHECK(std::string(tpcl_status_name(TPCL_ERR_CONFIG)) != std::string(tpcl_status_name(TPCL_ERR_NUMERIC)));
}

TEST_CASE("null arguments are rejected") {
  CHECK(tpcl_config_create("off_policy", nullptr) == TPCL_ERR_INVALID_ARGUMENT);
  CHECK(tpcl_config_set(nullptr, "rollout", "3") == TPCL_ERR_INVALID_ARGUMENT);
  CHECK(std::string(tpcl_last_error()).size() > 0);
  tpcl_trainer_state st;
  CHECK(tpcl_trainer_state_get(nullptr, &st) == TPCL_ERR_INVALID_ARGUMENT);
  tpcl_config_destroy(nullptr);
  tpcl_trainer_destroy(nullptr);
  tpcl_string_free(nullptr);
}

TEST_CASE("config handles") {
  tpcl_config* cfg = nullptr;
  CHECK(tpcl_config_create("no_such_preset", &cfg) == TPCL_ERR_CONFIG);
  CHECK(cfg == nullptr);
  REQUIRE(tpcl_config_create("chain_tabular", &cfg) == TPCL_OK);

  char* v = nullptr;
  REQUIRE(tpcl_config_get(cfg, "env", &v) == TPCL_OK);
  CHECK(take(v) == "chain");
  CHECK(tpcl_config_set(cfg, "not.a.key", "1") == TPCL_ERR_CONFIG);
  CHECK(std::string(tpcl_last_error()).find("not.a.key") != std::string::npos);
  CHECK(tpcl_config_set(cfg, "epsilon", "-2") == TPCL_OK);
  CHECK(tpcl_config_validate(cfg) == TPCL_ERR_CONFIG);
  CHECK(std::string(tpcl_last_error()).find("epsilon") != std::string::npos);
  REQUIRE(tpcl_config_set(cfg, "epsilon", "0.01") == TPCL_OK);
  CHECK(tpcl_config_validate(cfg) == TPCL_OK);

  char* text = nullptr;
  REQUIRE(tpcl_config_serialize(cfg, &text) == TPCL_OK);
  const std::string serialized = take(text);
  tpcl_config* parsed = nullptr;
  REQUIRE(tpcl_config_parse(serialized.c_str(), &parsed) == TPCL_OK);
  tpcl_config* copy = nullptr;
  REQUIRE(tpcl_config_clone(cfg, &copy) == TPCL_OK);

  char* h1 = nullptr;
  char* h2 = nullptr;
  char* h3 = nullptr;
  REQUIRE(tpcl_config_hash(cfg, &h1) == TPCL_OK);
  REQUIRE(tpcl_config_hash(parsed, &h2) == TPCL_OK);
  REQUIRE(tpcl_config_set(copy, "rollout", "9") == TPCL_OK);
  REQUIRE(tpcl_config_hash(copy, &h3) == TPCL_OK);
  const std::string a = take(h1), b = take(h2), c = take(h3);
  CHECK(a.size() == 40);
  CHECK(a == b);
  CHECK(a != c);

  CHECK(tpcl_config_load("/nonexistent/x.conf", &parsed) == TPCL_ERR_IO);
  tpcl_config_destroy(cfg);
  tpcl_config_destroy(parsed);
  tpcl_config_destroy(copy);
}

TEST_CASE("manifest write and load") {
  tpcl_config* cfg = small_config();
  const uint64_t seeds[] = {5, 6, 7};
  const auto path = scratch("manifest.json").string();
  REQUIRE(tpcl_manifest_write(cfg, seeds, 3, path.c_str()) == TPCL_OK);
  tpcl_config* loaded = nullptr;
  uint64_t out[2] = {0, 0};
  size_t n = 0;
  REQUIRE(tpcl_manifest_load(path.c_str(), &loaded, out, 2, &n) == TPCL_OK);
  CHECK(n == 3);
  CHECK(out[0] == 5);
  CHECK(out[1] == 6);
  char* h1 = nullptr;
  char* h2 = nullptr;
  tpcl_config_hash(cfg, &h1);
  tpcl_config_hash(loaded, &h2);
  CHECK(take(h1) == take(h2));

  char* metrics = nullptr;
  char* ckpt = nullptr;
  REQUIRE(tpcl_run_file_names(7, &metrics, &ckpt) == TPCL_OK);
  CHECK(take(metrics) == "metrics_seed7.csv");
  CHECK(take(ckpt) == "checkpoint_seed7.json");
  tpcl_config_destroy(cfg);
  tpcl_config_destroy(loaded);
}

TEST_CASE("trainer lifecycle") {
  tpcl_config* cfg = small_config();
  tpcl_trainer* t = nullptr;
  REQUIRE(tpcl_trainer_create(cfg, 3, &t) == TPCL_OK);
  REQUIRE(tpcl_trainer_step(t) == TPCL_OK);
  tpcl_trainer_state st{};
  REQUIRE(tpcl_trainer_state_get(t, &st) == TPCL_OK);
  CHECK(st.iteration == 1);
  CHECK(st.env_steps == 10);
  REQUIRE(tpcl_trainer_run(t) == TPCL_OK);
  REQUIRE(tpcl_trainer_state_get(t, &st) == TPCL_OK);
  CHECK(st.iteration == 12);

  size_t count = 0;
  REQUIRE(tpcl_trainer_metrics_count(t, &count) == TPCL_OK);
  CHECK(count == 3);
  tpcl_metrics_row row{};
  REQUIRE(tpcl_trainer_metrics_row(t, count - 1, &row) == TPCL_OK);
  CHECK(row.iteration == 12);
  CHECK(row.env_steps == 120);
  CHECK(tpcl_trainer_metrics_row(t, count, &row) != TPCL_OK);

  char* line = nullptr;
  REQUIRE(tpcl_metrics_format(&row, &line) == TPCL_OK);
  CHECK(take(line).rfind("12,120,", 0) == 0);
  CHECK(std::string(tpcl_metrics_header()) ==
        "iteration,env_steps,eval_return,lambda,kl_estimate,kl_target,loss,tau,seconds");

  double mean = 0.0;
  REQUIRE(tpcl_trainer_evaluate(t, 2, &mean) == TPCL_OK);
  CHECK(std::isfinite(mean));
  CHECK(tpcl_trainer_evaluate(t, 0, &mean) != TPCL_OK);

  const auto csv = scratch("metrics.csv").string();
  const auto ckpt = scratch("ckpt.json").string();
  REQUIRE(tpcl_trainer_write_metrics(t, csv.c_str()) == TPCL_OK);
  REQUIRE(tpcl_trainer_save_checkpoint(t, ckpt.c_str()) == TPCL_OK);
  double ckpt_mean = 0.0;
  REQUIRE(tpcl_evaluate_checkpoint(ckpt.c_str(), "point_mass", 2, 3, &ckpt_mean) == TPCL_OK);
  CHECK(std::isfinite(ckpt_mean));
  CHECK(tpcl_evaluate_checkpoint(ckpt.c_str(), "pendulum", 2, 3, &ckpt_mean) == TPCL_ERR_SHAPE);
  tpcl_trainer_destroy(t);

  REQUIRE(tpcl_config_set(cfg, "epsilon", "0") == TPCL_OK);
  t = nullptr;
  CHECK(tpcl_trainer_create(cfg, 3, &t) == TPCL_ERR_CONFIG);
  CHECK(t == nullptr);

  REQUIRE(tpcl_config_set(cfg, "epsilon", "0.01") == TPCL_OK);
  REQUIRE(tpcl_config_set(cfg, "lr.policy", "1e300") == TPCL_OK);
  REQUIRE(tpcl_config_set(cfg, "lr.value", "1e300") == TPCL_OK);
  REQUIRE(tpcl_config_set(cfg, "train_steps", "100") == TPCL_OK);
  REQUIRE(tpcl_trainer_create(cfg, 3, &t) == TPCL_OK);
  CHECK(tpcl_trainer_run(t) == TPCL_ERR_NUMERIC);
  CHECK(std::string(tpcl_last_error()).find("iteration") != std::string::npos);
  tpcl_trainer_destroy(t);
  tpcl_config_destroy(cfg);
}

TEST_CASE("verification callbacks") {
  const uint64_t* seeds = nullptr;
  size_t n = 0;
  REQUIRE(tpcl_oracle_corpus_seeds(&seeds, &n) == TPCL_OK);
  CHECK(n == 50);
  std::vector<tpcl_oracle_row> rows;
  double overall = 1.0;
  int passed = 0;
  auto on_row = [](const tpcl_oracle_row* r, void* user) { static_cast<std::vector<tpcl_oracle_row>*>(user)->push_back(*r); };
  REQUIRE(tpcl_oracle_check(seeds, 4, 3, 0, on_row, &rows, &overall, &passed) == TPCL_OK);
  CHECK(rows.size() == 4);
  CHECK(passed == 1);
  CHECK(overall <= 1e-8);
  REQUIRE(tpcl_oracle_check(seeds, 2, 3, 1, nullptr, nullptr, &overall, &passed) == TPCL_OK);
  CHECK(passed == 0);

  int entries = 0;
  double worst = 1.0;
  auto on_entry = [](const tpcl_grad_entry* e, void* user) {
    CHECK(e->name != nullptr);
    ++*static_cast<int*>(user);
  };
  REQUIRE(tpcl_grad_check(0, on_entry, &entries, &worst, &passed) == TPCL_OK);
  CHECK(entries > 0);
  CHECK(passed == 1);
  CHECK(worst < 1e-4);
}

TEST_CASE("KL and lambda") {
  const double returns[] = {0.0, 2.0};
  double kl = -1.0;
  REQUIRE(tpcl_estimate_kl(returns, 2, 1.0, &kl) == TPCL_OK);
  const double z = 0.5 * (1.0 + std::exp(2.0));
  CHECK(kl == doctest::Approx(-std::log(z) + std::exp(2.0) / z).epsilon(1e-9));
  CHECK(tpcl_estimate_kl(returns, 1, 1.0, &kl) == TPCL_ERR_INSUFFICIENT_DATA);
  CHECK(tpcl_estimate_kl(returns, 2, 0.0, &kl) == TPCL_ERR_CONFIG);

  std::vector<double> r;
  for (int k = 0; k < 50; ++k) r.push_back(std::sin(0.7 * k) * 3.0);
  double lambda = 0.0;
  tpcl_lambda_status status = TPCL_LAMBDA_INSUFFICIENT_DATA;
  REQUIRE(tpcl_solve_lambda(r.data(), r.size(), 20.0, 0.01, 1e-4, 1e4, &lambda, &kl, &status) == TPCL_OK);
  CHECK(status == TPCL_LAMBDA_SOLVED);
  CHECK(std::abs(kl - 0.2) <= 2e-4);
  REQUIRE(tpcl_solve_lambda(r.data(), 1, 20.0, 0.01, 1e-4, 1e4, &lambda, &kl, &status) == TPCL_OK);
  CHECK(status == TPCL_LAMBDA_INSUFFICIENT_DATA);
}

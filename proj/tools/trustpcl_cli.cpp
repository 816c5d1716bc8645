// trustpcl command-line driver. Talks to the library only through the C API.

#include <trustpcl/trustpcl.h>

#include <CLI11.hpp>
#include <json.hpp>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kVerificationFailed = 1, kConfigError = 2, kNumericError = 3 };

// Status from the library, carried as an exception to the command boundary.
struct ApiFailure {
  tpcl_status status;
  std::string message;
};

void check(tpcl_status s) {
  if (s != TPCL_OK) throw ApiFailure{s, tpcl_last_error()};
}

int exit_code_for(tpcl_status s) {
  switch (s) {
    case TPCL_ERR_CONFIG:
    case TPCL_ERR_USAGE:
    case TPCL_ERR_INVALID_ARGUMENT: return kConfigError;
    case TPCL_ERR_NUMERIC: return kNumericError;
    default: return kVerificationFailed;
  }
}

std::string take(char* s) {
  std::string out = s ? s : "";
  tpcl_string_free(s);
  return out;
}

struct ConfigDeleter {
  void operator()(tpcl_config* c) const { tpcl_config_destroy(c); }
};
struct TrainerDeleter {
  void operator()(tpcl_trainer* t) const { tpcl_trainer_destroy(t); }
};
using ConfigPtr = std::unique_ptr<tpcl_config, ConfigDeleter>;
using TrainerPtr = std::unique_ptr<tpcl_trainer, TrainerDeleter>;

ConfigPtr make_config(const std::string& path, const std::string& preset) {
  tpcl_config* c = nullptr;
  if (!path.empty()) {
    check(tpcl_config_load(path.c_str(), &c));
  } else {
    check(tpcl_config_create(preset.c_str(), &c));
  }
  return ConfigPtr(c);
}

void apply_overrides(tpcl_config* c, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ApiFailure{TPCL_ERR_CONFIG, "override '" + o + "' is not key=value"};
    check(tpcl_config_set(c, o.substr(0, eq).c_str(), o.substr(eq + 1).c_str()));
  }
}

std::size_t worker_count(std::size_t jobs) {
  std::size_t n = jobs;
  if (const char* env = std::getenv("TRUST_PCL_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
  }
  return std::max<std::size_t>(n, 1);
}

// Runs jobs 0..n-1 on a bounded pool. The first failure is rethrown once all
// workers have stopped.
template <class Job>
void run_parallel(std::size_t n, Job job) {
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::optional<ApiFailure> first_error;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        job(i);
      } catch (const ApiFailure& f) {
        std::lock_guard lock(mu);
        if (!first_error) first_error = f;
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t workers = worker_count(n);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (first_error) throw *first_error;
}

struct RunOutput {
  std::vector<tpcl_metrics_row> rows;
  TrainerPtr trainer;
};

RunOutput train_one(const tpcl_config* cfg, std::uint64_t seed) {
  tpcl_trainer* t = nullptr;
  check(tpcl_trainer_create(cfg, seed, &t));
  RunOutput out{{}, TrainerPtr(t)};
  check(tpcl_trainer_run(t));
  std::size_t n = 0;
  check(tpcl_trainer_metrics_count(t, &n));
  out.rows.resize(n);
  for (std::size_t i = 0; i < n; ++i) check(tpcl_trainer_metrics_row(t, i, &out.rows[i]));
  return out;
}

std::string format_row(const tpcl_metrics_row& r) {
  char* s = nullptr;
  check(tpcl_metrics_format(&r, &s));
  return take(s);
}

// ---- train ---------------------------------------------------------------

struct TrainArgs {
  std::string config;
  std::string preset = "off_policy";
  std::string manifest;
  std::vector<std::uint64_t> seeds;
  std::string out;
  std::vector<std::string> overrides;
};

int cmd_train(const TrainArgs& a) {
  ConfigPtr cfg;
  std::vector<std::uint64_t> seeds = a.seeds;
  if (!a.manifest.empty()) {
    tpcl_config* c = nullptr;
    std::size_t n = 0;
    check(tpcl_manifest_load(a.manifest.c_str(), &c, nullptr, 0, &n));
    tpcl_config_destroy(c);
    std::vector<std::uint64_t> stored(n);
    check(tpcl_manifest_load(a.manifest.c_str(), &c, stored.data(), n, &n));
    cfg.reset(c);
    if (seeds.empty()) seeds = stored;
  } else {
    cfg = make_config(a.config, a.preset);
  }
  apply_overrides(cfg.get(), a.overrides);
  check(tpcl_config_validate(cfg.get()));
  if (seeds.empty()) seeds = {1};

  fs::create_directories(a.out);
  check(tpcl_manifest_write(cfg.get(), seeds.data(), seeds.size(), (fs::path(a.out) / "manifest.json").c_str()));

  std::vector<double> finals(seeds.size(), std::nan(""));
  run_parallel(seeds.size(), [&](std::size_t i) {
    RunOutput run = train_one(cfg.get(), seeds[i]);
    char* metrics = nullptr;
    char* checkpoint = nullptr;
    check(tpcl_run_file_names(seeds[i], &metrics, &checkpoint));
    const std::string metrics_path = (fs::path(a.out) / take(metrics)).string();
    const std::string checkpoint_path = (fs::path(a.out) / take(checkpoint)).string();
    check(tpcl_trainer_write_metrics(run.trainer.get(), metrics_path.c_str()));
    check(tpcl_trainer_save_checkpoint(run.trainer.get(), checkpoint_path.c_str()));
    if (!run.rows.empty()) finals[i] = run.rows.back().eval_return;
  });

  char* hash = nullptr;
  check(tpcl_config_hash(cfg.get(), &hash));
  std::cout << "config " << take(hash) << "\n";
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    std::cout << "seed " << seeds[i] << " final_eval_return " << finals[i] << "\n";
  }
  return kOk;
}

// ---- evaluate ------------------------------------------------------------

int cmd_evaluate(const std::string& checkpoint, const std::string& env, int episodes, std::uint64_t seed) {
  double mean = 0.0;
  check(tpcl_evaluate_checkpoint(checkpoint.c_str(), env.c_str(), episodes, seed, &mean));
  std::cout << "mean_return " << mean << "\n";
  return kOk;
}

// ---- oracle-check --------------------------------------------------------

std::vector<std::uint64_t> read_seed_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ApiFailure{TPCL_ERR_IO, "cannot read seed list " + path};
  std::vector<std::uint64_t> seeds;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    std::uint64_t s = 0;
    while (ls >> s) seeds.push_back(s);
  }
  return seeds;
}

int cmd_oracle_check(const std::string& corpus, int d_max, bool corrupt, const std::string& report_path) {
  std::vector<std::uint64_t> seeds;
  if (corpus.empty()) {
    const uint64_t* s = nullptr;
    std::size_t n = 0;
    check(tpcl_oracle_corpus_seeds(&s, &n));
    seeds.assign(s, s + n);
  } else {
    seeds = read_seed_list(corpus);
  }
  std::printf("%-8s %3s %3s %12s %12s\n", "seed", "S", "A", "residual", "violation");
  nlohmann::json rows = nlohmann::json::array();
  auto on_row = [](const tpcl_oracle_row* r, void* user) {
    std::printf("%-8llu %3d %3d %12.3e %12.3e%s\n", static_cast<unsigned long long>(r->seed), r->num_states,
                r->num_actions, r->max_residual, r->max_violation, r->converged ? "" : "  (not converged)");
    static_cast<nlohmann::json*>(user)->push_back({{"seed", r->seed},
                                                   {"num_states", r->num_states},
                                                   {"num_actions", r->num_actions},
                                                   {"max_residual", r->max_residual},
                                                   {"max_violation", r->max_violation},
                                                   {"converged", r->converged != 0}});
  };
  double overall = 0.0;
  int passed = 0;
  check(tpcl_oracle_check(seeds.data(), seeds.size(), d_max, corrupt ? 1 : 0, on_row, &rows, &overall, &passed));
  std::printf("overall max violation %.3e over %zu MDPs, d <= %d: %s\n", overall, seeds.size(), d_max,
              passed ? "PASS" : "FAIL");
  if (!report_path.empty()) {
    const nlohmann::json report{{"d_max", d_max},
                                {"violation_threshold", 1e-8},
                                {"residual_threshold", 1e-10},
                                {"overall_max_violation", overall},
                                {"passed", passed != 0},
                                {"mdps", rows}};
    std::ofstream out(report_path);
    if (!(out << report.dump(2) << "\n")) throw ApiFailure{TPCL_ERR_IO, "cannot write report " + report_path};
  }
  return passed ? kOk : kVerificationFailed;
}

// ---- grad-check ----------------------------------------------------------

int cmd_grad_check(bool broken) {
  struct Worst {
    std::string name;
    double error = -1.0;
  } worst;
  auto on_entry = [](const tpcl_grad_entry* e, void* user) {
    auto* w = static_cast<Worst*>(user);
    std::printf("%-42s params %5d  max rel err %.3e\n", e->name, e->num_params, e->max_relative_error);
    if (e->max_relative_error > w->error) *w = {e->name, e->max_relative_error};
  };
  double max_err = 0.0;
  int passed = 0;
  check(tpcl_grad_check(broken ? 1 : 0, on_entry, &worst, &max_err, &passed));
  std::printf("worst: %s (%.3e), threshold 1e-4: %s\n", worst.name.c_str(), max_err, passed ? "PASS" : "FAIL");
  return passed ? kOk : kVerificationFailed;
}

// ---- lambda-trace --------------------------------------------------------

struct ReturnSet {
  std::vector<double> returns;
  double mean_length = 1.0;
};

// One return per line, or "return,length" pairs.
ReturnSet read_returns(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ApiFailure{TPCL_ERR_IO, "cannot read returns file " + path};
  ReturnSet set;
  double length_sum = 0.0;
  std::size_t with_length = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double r = 0.0;
    if (!(ls >> r)) continue;
    set.returns.push_back(r);
    double len = 0.0;
    if (ls >> len) {
      length_sum += len;
      ++with_length;
    }
  }
  if (with_length > 0) set.mean_length = length_sum / static_cast<double>(with_length);
  return set;
}

// "normal:N:MEAN:STD:SEED" or "uniform:N:LO:HI:SEED".
ReturnSet synthetic_returns(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 5 || (parts[0] != "normal" && parts[0] != "uniform")) {
    throw ApiFailure{TPCL_ERR_CONFIG, "synthetic spec must be normal:N:MEAN:STD:SEED or uniform:N:LO:HI:SEED"};
  }
  const auto n = std::stoul(parts[1]);
  const double a = std::stod(parts[2]);
  const double b = std::stod(parts[3]);
  std::mt19937_64 rng(std::stoull(parts[4]));
  ReturnSet set;
  for (std::size_t i = 0; i < n; ++i) {
    if (parts[0] == "normal") {
      set.returns.push_back(std::normal_distribution<double>(a, b)(rng));
    } else {
      set.returns.push_back(std::uniform_real_distribution<double>(a, b)(rng));
    }
  }
  return set;
}

int cmd_lambda_trace(const std::string& returns_path, const std::string& synthetic, std::vector<double> epsilons,
                     double mean_length, const std::string& out_dir) {
  if (returns_path.empty() == synthetic.empty()) {
    throw ApiFailure{TPCL_ERR_CONFIG, "give exactly one of --returns and --synthetic"};
  }
  ReturnSet set = returns_path.empty() ? synthetic_returns(synthetic) : read_returns(returns_path);
  if (mean_length > 0.0) set.mean_length = mean_length;
  if (set.returns.size() < 2) throw ApiFailure{TPCL_ERR_INSUFFICIENT_DATA, "lambda-trace needs at least 2 returns"};
  if (epsilons.empty()) epsilons = {0.001, 0.002, 0.005, 0.01};
  std::sort(epsilons.begin(), epsilons.end());

  const double lambda_min = 1e-4;
  const double lambda_max = 1e4;
  std::ostringstream kl_csv;
  kl_csv << "lambda,kl\n";
  bool monotone = true;
  double prev = INFINITY;
  const int per_decade = 8;
  for (int k = -4 * per_decade; k <= 4 * per_decade; ++k) {
    const double lambda = std::pow(10.0, static_cast<double>(k) / per_decade);
    double kl = 0.0;
    check(tpcl_estimate_kl(set.returns.data(), set.returns.size(), lambda, &kl));
    kl_csv << lambda << "," << kl << "\n";
    if (kl > prev + 1e-12 * std::max(1.0, std::abs(prev))) monotone = false;
    prev = kl;
  }

  std::ostringstream eps_csv;
  eps_csv << "epsilon,lambda,kl,target,status\n";
  double prev_lambda = INFINITY;
  bool lambda_monotone = true;
  for (double eps : epsilons) {
    double lambda = 0.0;
    double kl = 0.0;
    tpcl_lambda_status st{};
    check(tpcl_solve_lambda(set.returns.data(), set.returns.size(), set.mean_length, eps, lambda_min, lambda_max,
                            &lambda, &kl, &st));
    eps_csv << eps << "," << lambda << "," << kl << "," << eps * set.mean_length << "," << static_cast<int>(st) << "\n";
    if (lambda > prev_lambda) lambda_monotone = false;
    prev_lambda = lambda;
  }

  if (out_dir.empty()) {
    std::cout << kl_csv.str() << "\n" << eps_csv.str();
  } else {
    fs::create_directories(out_dir);
    std::ofstream(fs::path(out_dir) / "kl_vs_lambda.csv") << kl_csv.str();
    std::ofstream(fs::path(out_dir) / "lambda_vs_epsilon.csv") << eps_csv.str();
  }
  std::cerr << "kl monotone in lambda: " << (monotone ? "yes" : "NO") << "\n"
            << "lambda monotone in epsilon: " << (lambda_monotone ? "yes" : "NO") << "\n";
  return monotone && lambda_monotone ? kOk : kVerificationFailed;
}

// ---- ablate --------------------------------------------------------------

struct Arm {
  std::string name;
  ConfigPtr config;
};

int cmd_ablate(const std::string& study, const std::string& env, int num_seeds, const std::string& out_dir,
               const std::vector<std::string>& overrides) {
  if (num_seeds < 1) throw ApiFailure{TPCL_ERR_CONFIG, "--seeds must be >= 1"};
  std::vector<Arm> arms;
  auto add_arm = [&](const std::string& name, const std::string& preset, std::vector<std::string> sets) {
    ConfigPtr c = make_config("", preset);
    check(tpcl_config_set(c.get(), "env", env.c_str()));
    sets.insert(sets.end(), overrides.begin(), overrides.end());
    apply_overrides(c.get(), sets);
    check(tpcl_config_validate(c.get()));
    arms.push_back({name, std::move(c)});
  };
  if (study == "epsilon") {
    for (const char* eps : {"0.001", "0.002", "0.005", "0.01", "inf"}) {
      add_arm(std::string("eps=") + eps, "off_policy", {std::string("epsilon=") + eps});
    }
  } else if (study == "onoff") {
    add_arm("off_policy", "off_policy", {});
    add_arm("on_policy", "on_policy", {});
  } else {
    throw ApiFailure{TPCL_ERR_CONFIG, "unknown study '" + study + "' (expected epsilon or onoff)"};
  }

  struct Job {
    std::size_t arm;
    std::uint64_t seed;
    std::vector<tpcl_metrics_row> rows;
  };
  std::vector<Job> jobs;
  for (std::size_t a = 0; a < arms.size(); ++a) {
    for (int s = 1; s <= num_seeds; ++s) jobs.push_back({a, static_cast<std::uint64_t>(s), {}});
  }
  run_parallel(jobs.size(), [&](std::size_t i) { jobs[i].rows = train_one(arms[jobs[i].arm].config.get(), jobs[i].seed).rows; });

  std::sort(jobs.begin(), jobs.end(), [&](const Job& x, const Job& y) {
    return std::tie(arms[x.arm].name, x.seed) < std::tie(arms[y.arm].name, y.seed);
  });
  fs::create_directories(out_dir);
  const fs::path merged = fs::path(out_dir) / ("ablate_" + study + ".csv");
  std::ofstream csv(merged);
  if (!csv) throw ApiFailure{TPCL_ERR_IO, "cannot write " + merged.string()};
  csv << "arm,seed," << tpcl_metrics_header() << "\n";
  for (const auto& j : jobs) {
    for (const auto& r : j.rows) csv << arms[j.arm].name << "," << j.seed << "," << format_row(r) << "\n";
  }
  for (const auto& arm : arms) {
    std::vector<double> finals;
    for (const auto& j : jobs) {
      if (&arms[j.arm] == &arm && !j.rows.empty()) finals.push_back(j.rows.back().eval_return);
    }
    double mean = 0.0;
    for (double f : finals) mean += f;
    mean /= std::max<std::size_t>(finals.size(), 1);
    double var = 0.0;
    for (double f : finals) var += (f - mean) * (f - mean);
    const double sd = finals.size() > 1 ? std::sqrt(var / static_cast<double>(finals.size() - 1)) : 0.0;
    std::sort(finals.begin(), finals.end());
    const double median = finals.empty() ? NAN
                          : finals.size() % 2 ? finals[finals.size() / 2]
                                              : 0.5 * (finals[finals.size() / 2 - 1] + finals[finals.size() / 2]);
    std::printf("%-12s final return median %10.4f  sd %10.4f  (%zu seeds)\n", arm.name.c_str(), median, sd,
                finals.size());
  }
  std::printf("wrote %s\n", merged.c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trust-region path consistency learning"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train one or more seeds and write metrics, checkpoints, manifest");
  train_cmd->add_option("--config", train.config, "Config file (key = value lines)")->check(CLI::ExistingFile);
  train_cmd->add_option("--preset", train.preset, "Preset used when no --config is given");
  train_cmd->add_option("--manifest", train.manifest, "Re-run the config and seeds of a manifest")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--seed", train.seeds, "Seeds (default 1)");
  train_cmd->add_option("--out", train.out, "Output directory")->required();
  train_cmd->add_option("--override", train.overrides, "key=value, applied after the config");

  std::string ckpt, eval_env = "point_mass";
  int eval_episodes = 10;
  std::uint64_t eval_seed = 1;
  auto* eval_cmd = app.add_subcommand("evaluate", "Greedy evaluation of a checkpoint");
  eval_cmd->add_option("--checkpoint", ckpt, "Checkpoint JSON")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--env", eval_env, "Environment id");
  eval_cmd->add_option("--episodes", eval_episodes, "Episodes");
  eval_cmd->add_option("--seed", eval_seed, "Evaluation seed");

  std::string corpus;
  int d_max = 5;
  bool corrupt = false;
  auto* oracle_cmd = app.add_subcommand("oracle-check", "Verify the consistency identity on the tabular corpus");
  oracle_cmd->add_option("--corpus", corpus, "Seed list file (default: committed corpus)")->check(CLI::ExistingFile);
  oracle_cmd->add_option("--d-max", d_max, "Largest rollout length checked")->check(CLI::Range(1, 12));
  std::string oracle_report;
  oracle_cmd->add_option("--report", oracle_report, "Write a JSON verification report here");
  oracle_cmd->add_flag("--test-corrupt-solution", corrupt)->group("");

  bool broken = false;
  auto* grad_cmd = app.add_subcommand("grad-check", "Finite-difference gradient checks");
  grad_cmd->add_flag("--test-break-gradient", broken)->group("");

  std::string returns_path, synthetic, trace_out;
  std::vector<double> epsilons;
  double mean_length = 0.0;
  auto* trace_cmd = app.add_subcommand("lambda-trace", "KL-vs-lambda and lambda-vs-epsilon curves");
  trace_cmd->add_option("--returns", returns_path, "File with one return (or return,length) per line")
      ->check(CLI::ExistingFile);
  trace_cmd->add_option("--synthetic", synthetic, "normal:N:MEAN:STD:SEED or uniform:N:LO:HI:SEED");
  trace_cmd->add_option("--epsilon", epsilons, "Trust-region sizes (default 0.001 0.002 0.005 0.01)");
  trace_cmd->add_option("--mean-length", mean_length, "Mean episode length (overrides the file)");
  trace_cmd->add_option("--out", trace_out, "Output directory (default: stdout)");

  std::string study, ablate_env = "point_mass", ablate_out = "ablate_out";
  int num_seeds = 5;
  std::vector<std::string> ablate_overrides;
  auto* ablate_cmd = app.add_subcommand("ablate", "Epsilon or on/off-policy ablation");
  ablate_cmd->add_option("--study", study, "epsilon | onoff")->required();
  ablate_cmd->add_option("--env", ablate_env, "Environment id");
  ablate_cmd->add_option("--seeds", num_seeds, "Seeds per arm (1..k)");
  ablate_cmd->add_option("--out", ablate_out, "Output directory");
  ablate_cmd->add_option("--override", ablate_overrides, "key=value applied to every arm");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*train_cmd) return cmd_train(train);
    if (*eval_cmd) return cmd_evaluate(ckpt, eval_env, eval_episodes, eval_seed);
    if (*oracle_cmd) return cmd_oracle_check(corpus, d_max, corrupt, oracle_report);
    if (*grad_cmd) return cmd_grad_check(broken);
    if (*trace_cmd) return cmd_lambda_trace(returns_path, synthetic, epsilons, mean_length, trace_out);
    if (*ablate_cmd) return cmd_ablate(study, ablate_env, num_seeds, ablate_out, ablate_overrides);
  } catch (const ApiFailure& f) {
    std::cerr << "error: " << tpcl_status_name(f.status) << ": " << f.message << "\n";
    return exit_code_for(f.status);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kVerificationFailed;
  }
  return kOk;
}

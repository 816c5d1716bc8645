#include "trustpcl/trustpcl.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "checks/grad_check.hpp"
#include "checks/oracle_check.hpp"
#include "common/error.hpp"
#include "envs/env.hpp"
#include "models/serialize.hpp"
#include "oracle/corpus.hpp"
#include "trainer/manifest.hpp"
#include "trainer/trainer.hpp"
#include "trust/lambda.hpp"

struct tpcl_config {
  trustpcl::trainer::TrainConfig cfg;
};

struct tpcl_trainer {
  trustpcl::trainer::Trainer trainer;
};

namespace {

thread_local std::string g_last_error;

tpcl_status fail(tpcl_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

tpcl_status map_code(trustpcl::ErrorCode code) {
  using trustpcl::ErrorCode;
  switch (code) {
    case ErrorCode::kConfig: return TPCL_ERR_CONFIG;
    case ErrorCode::kNumeric: return TPCL_ERR_NUMERIC;
    case ErrorCode::kShape: return TPCL_ERR_SHAPE;
    case ErrorCode::kUsage: return TPCL_ERR_USAGE;
    case ErrorCode::kDomain: return TPCL_ERR_DOMAIN;
    case ErrorCode::kInfeasible: return TPCL_ERR_INFEASIBLE;
    case ErrorCode::kInsufficientData: return TPCL_ERR_INSUFFICIENT_DATA;
    case ErrorCode::kIo: return TPCL_ERR_IO;
    case ErrorCode::kVerification: return TPCL_ERR_INTERNAL;
  }
  return TPCL_ERR_INTERNAL;
}

// Runs `fn`, translating exceptions into status codes.
template <class Fn>
tpcl_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return TPCL_OK;
  } catch (const trustpcl::Error& e) {
    return fail(map_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(TPCL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(TPCL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(TPCL_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

tpcl_metrics_row to_c(const trustpcl::trainer::TrainMetricsRow& r) {
  return {r.iteration, r.env_steps, r.eval_return, r.lambda, r.kl_estimate, r.kl_target, r.loss, r.tau, r.seconds};
}

#define TPCL_REQUIRE(ptr) \
  if (!(ptr)) return fail(TPCL_ERR_INVALID_ARGUMENT, std::string(__func__) + ": null argument '" #ptr "'")

}  // namespace

extern "C" {

const char* tpcl_last_error(void) { return g_last_error.c_str(); }

const char* tpcl_status_name(tpcl_status status) {
  switch (status) {
    case TPCL_OK: return "ok";
    case TPCL_ERR_CONFIG: return "config error";
    case TPCL_ERR_NUMERIC: return "numeric error";
    case TPCL_ERR_SHAPE: return "shape error";
    case TPCL_ERR_USAGE: return "usage error";
    case TPCL_ERR_DOMAIN: return "domain error";
    case TPCL_ERR_INFEASIBLE: return "infeasible";
    case TPCL_ERR_INSUFFICIENT_DATA: return "insufficient data";
    case TPCL_ERR_IO: return "i/o error";
    case TPCL_ERR_INVALID_ARGUMENT: return "invalid argument";
    case TPCL_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* tpcl_version(void) { return "0.1.0"; }

void tpcl_string_free(char* s) { std::free(s); }

tpcl_status tpcl_config_create(const char* preset, tpcl_config** out) {
  TPCL_REQUIRE(out);
  return guarded([&] { *out = new tpcl_config{trustpcl::trainer::preset(preset ? preset : "off_policy")}; });
}

tpcl_status tpcl_config_load(const char* path, tpcl_config** out) {
  TPCL_REQUIRE(path);
  TPCL_REQUIRE(out);
  return guarded([&] { *out = new tpcl_config{trustpcl::trainer::load_config(path)}; });
}

tpcl_status tpcl_config_parse(const char* text, tpcl_config** out) {
  TPCL_REQUIRE(text);
  TPCL_REQUIRE(out);
  return guarded([&] { *out = new tpcl_config{trustpcl::trainer::parse(text)}; });
}

tpcl_status tpcl_config_clone(const tpcl_config* config, tpcl_config** out) {
  TPCL_REQUIRE(config);
  TPCL_REQUIRE(out);
  return guarded([&] { *out = new tpcl_config{*config}; });
}

void tpcl_config_destroy(tpcl_config* config) { delete config; }

tpcl_status tpcl_config_set(tpcl_config* config, const char* key, const char* value) {
  TPCL_REQUIRE(config);
  TPCL_REQUIRE(key);
  TPCL_REQUIRE(value);
  return guarded([&] { trustpcl::trainer::set_key(config->cfg, key, value); });
}

tpcl_status tpcl_config_get(const tpcl_config* config, const char* key, char** out) {
  TPCL_REQUIRE(config);
  TPCL_REQUIRE(key);
  TPCL_REQUIRE(out);
  return guarded([&] { *out = dup_string(trustpcl::trainer::get_key(config->cfg, key)); });
}

tpcl_status tpcl_config_validate(const tpcl_config* config) {
  TPCL_REQUIRE(config);
  return guarded([&] { config->cfg.validate(); });
}

tpcl_status tpcl_config_serialize(const tpcl_config* config, char** out) {
  TPCL_REQUIRE(config);
  TPCL_REQUIRE(out);
  return guarded([&] { *out = dup_string(trustpcl::trainer::serialize(config->cfg)); });
}

tpcl_status tpcl_config_hash(const tpcl_config* config, char** out) {
  TPCL_REQUIRE(config);
  TPCL_REQUIRE(out);
  return guarded([&] { *out = dup_string(trustpcl::trainer::config_hash(config->cfg)); });
}

tpcl_status tpcl_manifest_write(const tpcl_config* config, const uint64_t* seeds, size_t num_seeds, const char* path) {
  TPCL_REQUIRE(config);
  TPCL_REQUIRE(path);
  if (num_seeds > 0) TPCL_REQUIRE(seeds);
  return guarded([&] {
    const auto m = trustpcl::trainer::RunManifest::make(config->cfg, {seeds, seeds + num_seeds});
    trustpcl::trainer::save_manifest(path, m);
  });
}

tpcl_status tpcl_manifest_load(const char* path, tpcl_config** config, uint64_t* seeds, size_t capacity,
                               size_t* num_seeds) {
  TPCL_REQUIRE(path);
  TPCL_REQUIRE(config);
  TPCL_REQUIRE(num_seeds);
  if (capacity > 0) TPCL_REQUIRE(seeds);
  return guarded([&] {
    auto m = trustpcl::trainer::load_manifest(path);
    for (size_t i = 0; i < m.seeds.size() && i < capacity; ++i) seeds[i] = m.seeds[i];
    *num_seeds = m.seeds.size();
    *config = new tpcl_config{std::move(m.config)};
  });
}

tpcl_status tpcl_run_file_names(uint64_t seed, char** metrics_csv, char** checkpoint) {
  TPCL_REQUIRE(metrics_csv);
  TPCL_REQUIRE(checkpoint);
  return guarded([&] {
    const trustpcl::trainer::RunManifest m;
    *metrics_csv = dup_string(m.metrics_file(seed));
    *checkpoint = dup_string(m.checkpoint_file(seed));
  });
}

tpcl_status tpcl_trainer_create(const tpcl_config* config, uint64_t seed, tpcl_trainer** out) {
  TPCL_REQUIRE(config);
  TPCL_REQUIRE(out);
  return guarded([&] { *out = new tpcl_trainer{trustpcl::trainer::Trainer(config->cfg, seed)}; });
}

void tpcl_trainer_destroy(tpcl_trainer* trainer) { delete trainer; }

tpcl_status tpcl_trainer_step(tpcl_trainer* trainer) {
  TPCL_REQUIRE(trainer);
  return guarded([&] { trainer->trainer.train_iteration(); });
}

tpcl_status tpcl_trainer_run(tpcl_trainer* trainer) {
  TPCL_REQUIRE(trainer);
  return guarded([&] { trainer->trainer.run(); });
}

tpcl_status tpcl_trainer_state_get(const tpcl_trainer* trainer, tpcl_trainer_state* out) {
  TPCL_REQUIRE(trainer);
  TPCL_REQUIRE(out);
  const auto& t = trainer->trainer;
  *out = {t.iteration(), t.env_steps(), t.lambda(), t.tau(), t.last_loss(), t.trained_last_iteration() ? 1 : 0};
  return TPCL_OK;
}

tpcl_status tpcl_trainer_evaluate(const tpcl_trainer* trainer, int episodes, double* mean_return) {
  TPCL_REQUIRE(trainer);
  TPCL_REQUIRE(mean_return);
  return guarded([&] { *mean_return = trainer->trainer.evaluate_greedy(episodes); });
}

tpcl_status tpcl_trainer_metrics_count(const tpcl_trainer* trainer, size_t* count) {
  TPCL_REQUIRE(trainer);
  TPCL_REQUIRE(count);
  *count = trainer->trainer.metrics().size();
  return TPCL_OK;
}

tpcl_status tpcl_trainer_metrics_row(const tpcl_trainer* trainer, size_t index, tpcl_metrics_row* out) {
  TPCL_REQUIRE(trainer);
  TPCL_REQUIRE(out);
  const auto& rows = trainer->trainer.metrics();
  if (index >= rows.size()) return fail(TPCL_ERR_USAGE, "tpcl_trainer_metrics_row: index out of range");
  *out = to_c(rows[index]);
  return TPCL_OK;
}

tpcl_status tpcl_trainer_write_metrics(const tpcl_trainer* trainer, const char* path) {
  TPCL_REQUIRE(trainer);
  TPCL_REQUIRE(path);
  return guarded([&] { trustpcl::trainer::write_metrics_csv(path, trainer->trainer.metrics()); });
}

tpcl_status tpcl_trainer_save_checkpoint(const tpcl_trainer* trainer, const char* path) {
  TPCL_REQUIRE(trainer);
  TPCL_REQUIRE(path);
  return guarded([&] { trainer->trainer.save_checkpoint(path); });
}

const char* tpcl_metrics_header(void) { return trustpcl::trainer::kMetricsHeader; }

tpcl_status tpcl_metrics_format(const tpcl_metrics_row* row, char** out) {
  TPCL_REQUIRE(row);
  TPCL_REQUIRE(out);
  return guarded([&] {
    const trustpcl::trainer::TrainMetricsRow r{row->iteration, row->env_steps, row->eval_return,
                                               row->lambda,    row->kl_estimate, row->kl_target,
                                               row->loss,      row->tau,         row->seconds};
    *out = dup_string(trustpcl::trainer::format_metrics_row(r));
  });
}

tpcl_status tpcl_evaluate_checkpoint(const char* checkpoint_path, const char* env, int episodes, uint64_t seed,
                                     double* mean_return) {
  TPCL_REQUIRE(checkpoint_path);
  TPCL_REQUIRE(env);
  TPCL_REQUIRE(mean_return);
  return guarded([&] {
    const auto ckpt = trustpcl::models::load_checkpoint(checkpoint_path);
    const auto environment = trustpcl::envs::make_env(env);
    if (ckpt.policy->observation_dim() != environment->spec().observation_dim) {
      throw trustpcl::ShapeError("checkpoint observation size does not match environment '" + std::string(env) + "'");
    }
    *mean_return = trustpcl::trainer::evaluate(*environment, *ckpt.policy, episodes, seed);
  });
}

tpcl_status tpcl_oracle_corpus_seeds(const uint64_t** seeds, size_t* count) {
  TPCL_REQUIRE(seeds);
  TPCL_REQUIRE(count);
  const auto& s = trustpcl::oracle::corpus_seeds();
  static_assert(sizeof(uint64_t) == sizeof(std::uint64_t));
  *seeds = s.data();
  *count = s.size();
  return TPCL_OK;
}

tpcl_status tpcl_oracle_check(const uint64_t* seeds, size_t count, int d_max, int corrupt_first,
                              tpcl_oracle_row_fn on_row, void* user, double* overall_max_violation, int* passed) {
  if (count > 0) TPCL_REQUIRE(seeds);
  TPCL_REQUIRE(passed);
  return guarded([&] {
    trustpcl::checks::OracleCheckOptions opt;
    opt.d_max = d_max;
    opt.corrupt_first = corrupt_first != 0;
    const auto report = trustpcl::checks::run_oracle_check({seeds, seeds + count}, opt);
    if (on_row) {
      for (const auto& r : report.rows) {
        const tpcl_oracle_row row{r.seed, r.num_states, r.num_actions, r.max_residual, r.max_violation,
                                  r.converged ? 1 : 0};
        on_row(&row, user);
      }
    }
    if (overall_max_violation) *overall_max_violation = report.overall_max_violation;
    *passed = report.passed ? 1 : 0;
  });
}

tpcl_status tpcl_grad_check(int break_gradient, tpcl_grad_entry_fn on_entry, void* user, double* worst, int* passed) {
  TPCL_REQUIRE(passed);
  return guarded([&] {
    trustpcl::checks::GradCheckOptions opt;
    opt.break_gradient = break_gradient != 0;
    const auto entries = trustpcl::checks::run_grad_checks(opt);
    double w = 0.0;
    for (const auto& e : entries) {
      w = std::max(w, e.max_relative_error);
      if (on_entry) {
        const tpcl_grad_entry c{e.name.c_str(), e.max_relative_error, e.num_params};
        on_entry(&c, user);
      }
    }
    if (worst) *worst = w;
    *passed = w < opt.threshold ? 1 : 0;
  });
}

tpcl_status tpcl_estimate_kl(const double* returns, size_t count, double lambda, double* kl) {
  if (count > 0) TPCL_REQUIRE(returns);
  TPCL_REQUIRE(kl);
  return guarded([&] { *kl = trustpcl::trust::estimate_kl({returns, count}, lambda).kl; });
}

tpcl_status tpcl_solve_lambda(const double* returns, size_t count, double mean_length, double epsilon,
                              double lambda_min, double lambda_max, double* lambda, double* kl,
                              tpcl_lambda_status* status) {
  if (count > 0) TPCL_REQUIRE(returns);
  TPCL_REQUIRE(lambda);
  return guarded([&] {
    trustpcl::trust::LambdaSolver solver;
    solver.lambda_min = lambda_min;
    solver.lambda_max = lambda_max;
    const auto r = trustpcl::trust::solve_lambda({returns, count}, mean_length, epsilon, solver);
    *lambda = r.lambda;
    if (kl) *kl = r.kl;
    if (status) *status = static_cast<tpcl_lambda_status>(static_cast<int>(r.status));
  });
}

}  // extern "C"

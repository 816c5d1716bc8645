#pragma once

#include <cstddef>
#include <span>

#include "replay/replay.hpp"

namespace trustpcl::trust {

/// Sample estimate of the trajectory KL between the relative-entropy optimal
/// policy and the prior that generated `returns`.
struct KlEstimate {
  double kl = 0.0;
  double log_z = 0.0;
  std::size_t count = 0;
};

/// With w_k = R_k / lambda:
///   log Z = log mean_k exp(w_k)
///   KL    = -log Z + mean_k [w_k exp(w_k - log Z)]
/// Throws ConfigError for lambda <= 0 and InsufficientDataError for fewer
/// than two returns.
KlEstimate estimate_kl(std::span<const double> returns, double lambda);

struct LambdaSolver {
  double lambda_min = 1e-4;
  double lambda_max = 1e4;
  double rel_tolerance = 1e-3;
  int max_iterations = 100;
  double lambda = 1.0;  // current value, kept when the log is too short
};

enum class LambdaStatus { kSolved, kAtLowerBound, kAtUpperBound, kInsufficientData };

struct LambdaResult {
  double lambda = 0.0;
  double kl = 0.0;      // estimate at the returned lambda (0 without data)
  double target = 0.0;  // epsilon * mean episode length
  int iterations = 0;
  LambdaStatus status = LambdaStatus::kInsufficientData;
};

/// Bisection in log(lambda) for KL(lambda) = epsilon * mean length. Returns
/// the lower bound when the target exceeds KL at lambda_min and the upper
/// bound when KL at lambda_max still exceeds it. Updates solver.lambda.
LambdaResult solve_lambda(std::span<const double> returns, double mean_length, double epsilon, LambdaSolver& solver);
LambdaResult solve_lambda(const replay::EpisodeLog& log, double epsilon, LambdaSolver& solver);

}  // namespace trustpcl::trust

#include "trust/lambda.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "common/error.hpp"

namespace trustpcl::trust {

KlEstimate estimate_kl(std::span<const double> returns, double lambda) {
  if (!(lambda > 0.0)) throw ConfigError("estimate_kl: lambda must be positive");
  if (returns.size() < 2) throw InsufficientDataError("estimate_kl: need at least two returns");
  const double n = static_cast<double>(returns.size());

  // Centre the scaled returns on their mean, so both KL terms are O(spread^2)
  // for large lambda; once the spread exceeds 1, shift further to the maximum
  // so the dominant term is exactly zero for small lambda.
  const double mean_w = std::accumulate(returns.begin(), returns.end(), 0.0) / n / lambda;
  std::vector<double> u(returns.size());
  double max_u = -INFINITY;
  for (std::size_t k = 0; k < returns.size(); ++k) {
    u[k] = returns[k] / lambda - mean_w;
    max_u = std::max(max_u, u[k]);
  }
  const double shift = max_u > 1.0 ? max_u : 0.0;
  double sum_exp = 0.0;
  for (double& x : u) {
    x -= shift;
    sum_exp += std::exp(x);
  }
  const double log_mean_exp = std::log(sum_exp / n);

  double weighted = 0.0;
  for (double x : u) weighted += x * std::exp(x - log_mean_exp);
  weighted /= n;

  KlEstimate out;
  out.count = returns.size();
  out.log_z = mean_w + shift + log_mean_exp;
  out.kl = weighted - log_mean_exp;
  if (!std::isfinite(out.kl)) throw NumericError("estimate_kl: non-finite result");
  return out;
}

LambdaResult solve_lambda(std::span<const double> returns, double mean_length, double epsilon, LambdaSolver& solver) {
  if (!(epsilon > 0.0)) throw ConfigError("solve_lambda: epsilon must be positive");
  if (!(solver.lambda_min > 0.0 && solver.lambda_min < solver.lambda_max)) {
    throw ConfigError("solve_lambda: invalid lambda bounds");
  }
  LambdaResult r;
  if (returns.size() < 2) {
    r.lambda = solver.lambda;
    r.status = LambdaStatus::kInsufficientData;
    return r;
  }
  r.target = epsilon * mean_length;

  const auto kl_at = [&](double lambda) { return estimate_kl(returns, lambda).kl; };
  const double kl_low = kl_at(solver.lambda_min);
  if (kl_low <= r.target) {
    r.lambda = solver.lambda_min;
    r.kl = kl_low;
    r.status = LambdaStatus::kAtLowerBound;
  } else if (const double kl_high = kl_at(solver.lambda_max); kl_high >= r.target) {
    r.lambda = solver.lambda_max;
    r.kl = kl_high;
    r.status = LambdaStatus::kAtUpperBound;
  } else {
    double lo = std::log(solver.lambda_min);
    double hi = std::log(solver.lambda_max);
    double mid = 0.5 * (lo + hi);
    double kl = kl_at(std::exp(mid));
    for (r.iterations = 1; r.iterations < solver.max_iterations; ++r.iterations) {
      if (std::abs(kl - r.target) <= solver.rel_tolerance * r.target) break;
      // KL decreases in lambda: too much divergence means lambda must grow.
      if (kl > r.target) {
        lo = mid;
      } else {
        hi = mid;
      }
      mid = 0.5 * (lo + hi);
      kl = kl_at(std::exp(mid));
    }
    r.lambda = std::exp(mid);
    r.kl = kl;
    r.status = LambdaStatus::kSolved;
  }
  solver.lambda = std::clamp(r.lambda, solver.lambda_min, solver.lambda_max);
  r.lambda = solver.lambda;
  return r;
}

LambdaResult solve_lambda(const replay::EpisodeLog& log, double epsilon, LambdaSolver& solver) {
  const auto stats = log.stats(2);
  if (!stats) {
    if (!(epsilon > 0.0)) throw ConfigError("solve_lambda: epsilon must be positive");
    LambdaResult r;
    r.lambda = solver.lambda;
    r.status = LambdaStatus::kInsufficientData;
    return r;
  }
  return solve_lambda(stats->returns, stats->mean_length, epsilon, solver);
}

}  // namespace trustpcl::trust

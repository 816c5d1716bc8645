#include <doctest.h>

#include <cmath>
#include <vector>

#include "common/error.hpp"
#include "trust/lag.hpp"
#include "trust/lambda.hpp"

using namespace trustpcl;
using namespace trustpcl::trust;

namespace {

// Closed form for two returns {0, R}: Z = (1 + e^w) / 2 with w = R / lambda.
double two_point_kl(double r, double lambda) {
  const double w = r / lambda;
  const double z = 0.5 * (1.0 + std::exp(w));
  return -std::log(z) + 0.5 * w * std::exp(w) / z;
}

std::vector<double> spread_returns(int n, double scale, double offset) {
  std::vector<double> r;
  for (int k = 0; k < n; ++k) r.push_back(offset + scale * std::sin(1.7 * k + 0.3) * (1.0 + 0.1 * k));
  return r;
}

}  // namespace

TEST_SUITE("trust") {
  TEST_CASE("lag update is an exponential moving average") {
    LagState lag{ParamVector::Constant(2, 1.0), ParamVector::Constant(1, 4.0), 0.75};
    const LagState out = update_lag(lag, ParamVector::Constant(2, 5.0), ParamVector::Constant(1, 0.0));
    CHECK(out.policy == ParamVector::Constant(2, 2.0));
    CHECK(out.value == ParamVector::Constant(1, 3.0));

    lag.alpha = 0.0;
    CHECK(update_lag(lag, ParamVector::Constant(2, 5.0), ParamVector::Zero(1)).policy == ParamVector::Constant(2, 5.0));
    lag.alpha = 1.0;
    CHECK(update_lag(lag, ParamVector::Constant(2, 5.0), ParamVector::Zero(1)).policy == ParamVector::Constant(2, 1.0));
    lag.alpha = 1.2;
    CHECK_THROWS_AS(update_lag(lag, ParamVector::Zero(2), ParamVector::Zero(1)), ConfigError);
    lag.alpha = 0.5;
    CHECK_THROWS_AS(update_lag(lag, ParamVector::Zero(3), ParamVector::Zero(1)), ShapeError);
  }

  TEST_CASE("repeated lag updates contract toward fixed live parameters") {
    LagState lag{ParamVector::Constant(3, 10.0), ParamVector::Constant(2, -4.0), 0.9};
    const ParamVector target_p = ParamVector::Constant(3, 1.0);
    const ParamVector target_v = ParamVector::Constant(2, 2.0);
    double prev = (lag.policy - target_p).norm();
    for (int i = 0; i < 50; ++i) {
      lag = update_lag(lag, target_p, target_v);
      const double gap = (lag.policy - target_p).norm();
      CHECK(gap == doctest::Approx(0.9 * prev).epsilon(1e-9));
      prev = gap;
    }
    CHECK((lag.value - target_v).norm() == doctest::Approx(6.0 * std::sqrt(2.0) * std::pow(0.9, 50)).epsilon(1e-9));
  }

  TEST_CASE("KL estimate matches the two-point closed form") {
    for (double r : {0.5, 3.0, -2.0, 40.0}) {
      for (double lam : {0.1, 1.0, 7.5, 300.0}) {
        const std::vector<double> returns{0.0, r};
        const double expected = two_point_kl(std::abs(r), lam);  // symmetric in the sign of R
        CHECK(estimate_kl(returns, lam).kl == doctest::Approx(expected).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("KL edge cases") {
    const std::vector<double> equal(10, 3.5);
    for (double lam : {1e-4, 1.0, 1e4}) CHECK(estimate_kl(equal, lam).kl == 0.0);
    const auto r = spread_returns(50, 2.0, -10.0);
    CHECK(estimate_kl(r, 1e12).kl < 1e-10);
    // Tiny lambda concentrates on the single best return: KL -> log N.
    CHECK(estimate_kl(r, 1e-6).kl == doctest::Approx(std::log(50.0)).epsilon(1e-12));
    CHECK_THROWS_AS(estimate_kl(r, 0.0), ConfigError);
    CHECK_THROWS_AS(estimate_kl(std::vector<double>{1.0}, 1.0), InsufficientDataError);
  }

  TEST_CASE("KL is shift invariant, non-negative and decreasing in lambda") {
    const auto base = spread_returns(40, 3.0, 0.0);
    for (double shift : {-1000.0, 17.0, 1e5}) {
      auto shifted = base;
      for (double& x : shifted) x += shift;
      for (double lam : {0.01, 0.5, 20.0}) {
        CHECK(estimate_kl(shifted, lam).kl == doctest::Approx(estimate_kl(base, lam).kl).epsilon(1e-9));
      }
    }
    double prev = INFINITY;
    for (double log_lam = -4.0; log_lam <= 4.0; log_lam += 0.125) {
      const double kl = estimate_kl(base, std::pow(10.0, log_lam)).kl;
      CHECK(kl >= 0.0);
      CHECK(kl <= prev + 1e-12);
      prev = kl;
    }
  }

  TEST_CASE("solve_lambda hits the target") {
    const auto r = spread_returns(100, 5.0, -20.0);
    LambdaSolver solver;
    for (double eps : {0.001, 0.01, 0.05}) {
      const LambdaResult res = solve_lambda(r, 20.0, eps, solver);
      CHECK(res.status == LambdaStatus::kSolved);
      CHECK(res.target == doctest::Approx(20.0 * eps));
      CHECK(std::abs(res.kl - res.target) <= 1e-3 * res.target);
      CHECK(solver.lambda == res.lambda);
      CHECK(estimate_kl(r, res.lambda).kl == res.kl);
    }
  }

  TEST_CASE("solve_lambda clamps to the bounds") {
    const auto r = spread_returns(10, 1.0, 0.0);
    LambdaSolver solver;
    // Target above log N: even the smallest lambda is within budget.
    LambdaResult res = solve_lambda(r, 100.0, 1.0, solver);
    CHECK(res.status == LambdaStatus::kAtLowerBound);
    CHECK(res.lambda == solver.lambda_min);
    // Huge spread with a tiny target: the largest lambda still exceeds it.
    const auto wide = spread_returns(10, 1e7, 0.0);
    res = solve_lambda(wide, 1.0, 1e-9, solver);
    CHECK(res.status == LambdaStatus::kAtUpperBound);
    CHECK(res.lambda == solver.lambda_max);
    CHECK_THROWS_AS(solve_lambda(r, 10.0, 0.0, solver), ConfigError);
    LambdaSolver bad;
    bad.lambda_min = 2.0;
    bad.lambda_max = 1.0;
    CHECK_THROWS_AS(solve_lambda(r, 10.0, 0.01, bad), ConfigError);
  }

  TEST_CASE("solve_lambda keeps lambda without enough episodes") {
    LambdaSolver solver;
    solver.lambda = 0.37;
    replay::EpisodeLog log;
    log.log_episode(1.0, 10);
    const LambdaResult res = solve_lambda(log, 0.01, solver);
    CHECK(res.status == LambdaStatus::kInsufficientData);
    CHECK(res.lambda == 0.37);
    CHECK(solver.lambda == 0.37);
    log.log_episode(3.0, 10);
    log.log_episode(-2.0, 10);
    CHECK(solve_lambda(log, 0.01, solver).status == LambdaStatus::kSolved);
  }

  TEST_CASE("lambda grows as the trust region shrinks") {
    const auto r = spread_returns(100, 4.0, 0.0);
    LambdaSolver solver;
    double prev = INFINITY;
    for (double eps : {1e-4, 3e-4, 1e-3, 3e-3, 1e-2}) {
      const double lam = solve_lambda(r, 20.0, eps, solver).lambda;
      CHECK(lam < prev);
      prev = lam;
    }
  }
}

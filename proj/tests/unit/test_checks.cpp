#include <doctest.h>

#include "checks/grad_check.hpp"
#include "checks/oracle_check.hpp"
#include "oracle/corpus.hpp"

using namespace trustpcl;
using namespace trustpcl::checks;

TEST_SUITE("checks") {
  TEST_CASE("analytic gradients agree with finite differences") {
    const auto entries = run_grad_checks();
    CHECK(entries.size() >= 11);
    for (const auto& e : entries) {
      INFO(e.name);
      CHECK(e.num_params > 0);
      CHECK(e.max_relative_error < 1e-4);
    }
  }

  TEST_CASE("a broken gradient is caught") {
    GradCheckOptions opt;
    opt.break_gradient = true;
    for (const auto& e : run_grad_checks(opt)) {
      INFO(e.name);
      CHECK(e.max_relative_error >= 1e-4);
    }
  }

  TEST_CASE("oracle corpus passes and a corrupted solution fails") {
    const auto& seeds = oracle::corpus_seeds();
    CHECK(seeds.size() == 50);
    const auto report = run_oracle_check(seeds);
    CHECK(report.passed);
    CHECK(report.rows.size() == seeds.size());
    CHECK(report.overall_max_violation <= 1e-8);

    OracleCheckOptions bad;
    bad.corrupt_first = true;
    const auto broken = run_oracle_check({seeds.begin(), seeds.begin() + 3}, bad);
    CHECK_FALSE(broken.passed);
    CHECK(broken.rows[0].max_violation > 1e-4);
    CHECK(broken.rows[1].max_violation <= 1e-8);
  }
}

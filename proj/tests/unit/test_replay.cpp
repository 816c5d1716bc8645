#include <doctest.h>

#include <cmath>
#include <map>

#include "common/error.hpp"
#include "replay/replay.hpp"

using namespace trustpcl;
using namespace trustpcl::replay;

namespace {

Segment make_segment(std::uint64_t episode, int start, int length, bool ends = false) {
  Segment s;
  s.episode_id = episode;
  s.start_index = start;
  for (int i = 0; i < length; ++i) {
    Transition t;
    t.observation = Vec::Constant(2, start + i);
    t.action = discrete_action(0);
    t.reward = 1.0;
    s.transitions.push_back(t);
  }
  if (ends) s.transitions.back().timeout = true;
  s.next_observation = Vec::Constant(2, start + length);
  return s;
}

}  // namespace

TEST_SUITE("replay") {
  TEST_CASE("segment validation") {
    Segment s = make_segment(0, 0, 3);
    CHECK_NOTHROW(s.validate());
    s.transitions[1].terminal = true;
    CHECK_THROWS_AS(s.validate(), UsageError);
    Segment empty;
    CHECK_THROWS_AS(empty.validate(), UsageError);
    Segment nan = make_segment(0, 0, 2);
    nan.transitions[0].reward = std::nan("");
    CHECK_THROWS_AS(nan.validate(), UsageError);
  }

  TEST_CASE("FIFO eviction and transition count") {
    ReplayBuffer buf(3, 0.0);
    for (int i = 0; i < 5; ++i) buf.insert(make_segment(static_cast<std::uint64_t>(i), 0, i + 1), i);
    CHECK(buf.size() == 3);
    CHECK(buf.segments().front().episode_id == 2);
    CHECK(buf.segments().back().episode_id == 4);
    CHECK(buf.total_transitions() == 3 + 4 + 5);
    CHECK(buf.segments().front().priority == 2.0);
  }

  TEST_CASE("uniform sampling at beta = 0") {
    ReplayBuffer buf(10, 0.0);
    for (int i = 0; i < 10; ++i) buf.insert(make_segment(static_cast<std::uint64_t>(i), 0, 1), i * 7);
    Rng rng(11);
    std::map<std::uint64_t, int> counts;
    const int n = 100000;
    for (const Segment* s : buf.sample_batch(n, 1, rng)) ++counts[s->episode_id];
    double chi2 = 0.0;
    for (const auto& [id, c] : counts) chi2 += std::pow(c - n / 10.0, 2) / (n / 10.0);
    CHECK(counts.size() == 10);
    CHECK(chi2 < 27.88);  // 99.9% quantile, 9 degrees of freedom
  }

  TEST_CASE("priority weighting") {
    const double beta = std::log(2.0);
    ReplayBuffer buf(2, beta);
    buf.insert(make_segment(0, 0, 1), 0);
    buf.insert(make_segment(1, 0, 1), 1);
    const auto p = buf.probabilities();
    CHECK(p[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    Rng rng(12);
    int newer = 0;
    const int n = 60000;
    for (const Segment* s : buf.sample_batch(n, 1, rng)) newer += s->episode_id == 1;
    CHECK(std::abs(newer / static_cast<double>(n) - 2.0 / 3.0) < 0.01);
  }

  TEST_CASE("probabilities are invariant to shifting every priority") {
    ReplayBuffer a(4, 0.3), b(4, 0.3);
    for (int i = 0; i < 4; ++i) {
      a.insert(make_segment(0, i, 1), i);
      b.insert(make_segment(0, i, 1), i + 100000);
    }
    const auto pa = a.probabilities();
    const auto pb = b.probabilities();
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(pa[i] - pb[i]) < 1e-12);
    ReplayBuffer huge(2, 10.0);
    huge.insert(make_segment(0, 0, 1), 0);
    huge.insert(make_segment(0, 1, 1), 1000);
    const auto ph = huge.probabilities();
    CHECK(std::isfinite(ph[0]));
    CHECK(ph[1] == 1.0);
  }

  TEST_CASE("batch size and errors") {
    ReplayBuffer buf(5, 0.0);
    Rng rng(13);
    CHECK_THROWS_AS(buf.sample_batch(10, 3, rng), UsageError);
    buf.insert(make_segment(0, 0, 3), 0);
    CHECK(buf.sample_batch(10, 3, rng).size() == 4);
    CHECK(buf.sample_batch(9, 3, rng).size() == 3);
    CHECK(buf.sample_batch(1, 3, rng).size() == 1);
    CHECK_THROWS_AS(buf.sample_batch(0, 3, rng), ConfigError);
    CHECK_THROWS_AS(ReplayBuffer(0, 0.0), ConfigError);
    CHECK_THROWS_AS(ReplayBuffer(3, -1.0), ConfigError);
  }

  TEST_CASE("successor lookup") {
    ReplayBuffer buf(10, 0.0);
    buf.insert(make_segment(7, 0, 3), 0);
    buf.insert(make_segment(7, 3, 3, true), 0);
    buf.insert(make_segment(8, 3, 3), 0);
    const auto& segs = buf.segments();
    CHECK(buf.successor(segs[0]) == &segs[1]);
    CHECK(buf.successor(segs[1]) == nullptr);
    CHECK(buf.successor(segs[2]) == nullptr);
  }

  TEST_CASE("episode log keeps the latest hundred") {
    EpisodeLog log;
    CHECK_FALSE(log.stats().has_value());
    for (int i = 0; i < 101; ++i) log.log_episode(i, 20);
    CHECK(log.size() == 100);
    CHECK(log.records().front().total_return == 1.0);
    const auto s = log.stats();
    REQUIRE(s.has_value());
    CHECK(s->mean_length == 20.0);
    CHECK(s->returns.size() == 100);
    CHECK_THROWS_AS(log.log_episode(0.0, 0), UsageError);
    EpisodeLog one;
    one.log_episode(1.0, 5);
    CHECK_FALSE(one.stats().has_value());
    CHECK(one.stats(1).has_value());
  }
}

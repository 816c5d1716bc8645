#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "common/types.hpp"

namespace trustpcl::replay {

struct Transition {
  Vec observation;
  Action action;
  double reward = 0.0;
  double log_prob = 0.0;  // behaviour log-density at collection time, diagnostics only
  bool terminal = false;
  bool timeout = false;
};

/// Contiguous piece of one episode. `next_observation` follows the last
/// transition. Only the last transition may be terminal or a timeout.
struct Segment {
  std::uint64_t episode_id = 0;
  int start_index = 0;
  std::vector<Transition> transitions;
  Vec next_observation;
  double priority = 0.0;

  int length() const { return static_cast<int>(transitions.size()); }
  bool ends_episode() const;
  /// Throws UsageError when the invariants above do not hold.
  void validate() const;
};

/// FIFO-bounded segment store sampled with probability proportional to
/// exp(beta * priority).
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, double beta);

  void insert(Segment segment, std::int64_t train_step);
  /// Draws ceil(total_transitions / segment_length) segments with replacement.
  std::vector<const Segment*> sample_batch(int total_transitions, int segment_length, Rng& rng) const;
  /// Sampling probabilities in storage order.
  std::vector<double> probabilities() const;

  std::size_t size() const { return segments_.size(); }
  std::size_t capacity() const { return capacity_; }
  double beta() const { return beta_; }
  std::size_t total_transitions() const { return total_transitions_; }
  const std::deque<Segment>& segments() const { return segments_; }
  /// Segment that directly continues `seg` within its episode, if stored.
  const Segment* successor(const Segment& seg) const;

 private:
  std::size_t capacity_;
  double beta_;
  std::deque<Segment> segments_;
  std::size_t total_transitions_ = 0;
};

struct EpisodeRecord {
  double total_return = 0.0;
  int length = 1;
};

struct EpisodeStats {
  std::vector<double> returns;
  std::vector<int> lengths;
  double mean_length = 0.0;
};

/// The most recent completed episodes (at most 100).
class EpisodeLog {
 public:
  static constexpr std::size_t kCapacity = 100;

  void log_episode(double total_return, int length);
  std::size_t size() const { return records_.size(); }
  const std::deque<EpisodeRecord>& records() const { return records_; }
  /// std::nullopt with fewer than `min_episodes` entries.
  std::optional<EpisodeStats> stats(std::size_t min_episodes = 2) const;

 private:
  std::deque<EpisodeRecord> records_;
};

}  // namespace trustpcl::replay

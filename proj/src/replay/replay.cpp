#include "replay/replay.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace trustpcl::replay {

bool Segment::ends_episode() const {
  return !transitions.empty() && (transitions.back().terminal || transitions.back().timeout);
}

void Segment::validate() const {
  if (transitions.empty()) throw UsageError("segment: no transitions");
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    const auto& t = transitions[i];
    if (!std::isfinite(t.reward)) throw UsageError("segment: non-finite reward");
    if (t.terminal && t.timeout) throw UsageError("segment: transition both terminal and timeout");
    if ((t.terminal || t.timeout) && i + 1 != transitions.size()) {
      throw UsageError("segment: episode end before the last transition");
    }
  }
  if (next_observation.size() != transitions.front().observation.size()) {
    throw UsageError("segment: missing next observation");
  }
}

ReplayBuffer::ReplayBuffer(std::size_t capacity, double beta) : capacity_(capacity), beta_(beta) {
  if (capacity_ == 0) throw ConfigError("replay: capacity must be positive");
  if (!(beta_ >= 0.0)) throw ConfigError("replay: beta must be non-negative");
}

void ReplayBuffer::insert(Segment segment, std::int64_t train_step) {
  segment.validate();
  segment.priority = static_cast<double>(train_step);
  total_transitions_ += segment.transitions.size();
  segments_.push_back(std::move(segment));
  while (segments_.size() > capacity_) {
    total_transitions_ -= segments_.front().transitions.size();
    segments_.pop_front();
  }
}

std::vector<double> ReplayBuffer::probabilities() const {
  std::vector<double> w(segments_.size());
  if (segments_.empty()) return w;
  double max_p = segments_.front().priority;
  for (const auto& s : segments_) max_p = std::max(max_p, s.priority);
  double total = 0.0;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    w[i] = std::exp(beta_ * (segments_[i].priority - max_p));
    total += w[i];
  }
  for (auto& x : w) x /= total;
  return w;
}

std::vector<const Segment*> ReplayBuffer::sample_batch(int total_transitions, int segment_length, Rng& rng) const {
  if (segments_.empty()) throw UsageError("replay: cannot sample from an empty buffer");
  if (total_transitions < 1 || segment_length < 1) throw ConfigError("replay: batch sizes must be positive");
  const int count = (total_transitions + segment_length - 1) / segment_length;

  const std::vector<double> p = probabilities();
  std::vector<double> cumulative(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    cumulative[i] = acc;
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<const Segment*> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double draw = u(rng) * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), draw);
    std::size_t idx = static_cast<std::size_t>(it - cumulative.begin());
    if (idx >= segments_.size()) idx = segments_.size() - 1;
    out.push_back(&segments_[idx]);
  }
  return out;
}

const Segment* ReplayBuffer::successor(const Segment& seg) const {
  if (seg.ends_episode()) return nullptr;
  const int next_start = seg.start_index + seg.length();
  for (const auto& s : segments_) {
    if (s.episode_id == seg.episode_id && s.start_index == next_start) return &s;
  }
  return nullptr;
}

void EpisodeLog::log_episode(double total_return, int length) {
  if (length < 1) throw UsageError("episode log: length must be >= 1");
  records_.push_back({total_return, length});
  while (records_.size() > kCapacity) records_.pop_front();
}

std::optional<EpisodeStats> EpisodeLog::stats(std::size_t min_episodes) const {
  if (records_.size() < std::max<std::size_t>(min_episodes, 1)) return std::nullopt;
  EpisodeStats s;
  double total_len = 0.0;
  for (const auto& r : records_) {
    s.returns.push_back(r.total_return);
    s.lengths.push_back(r.length);
    total_len += r.length;
  }
  s.mean_length = total_len / static_cast<double>(records_.size());
  return s;
}

}  // namespace trustpcl::replay

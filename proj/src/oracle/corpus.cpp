#include "oracle/corpus.hpp"

namespace trustpcl::oracle {

namespace {

Vec dirichlet_ones(int n, Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = e(rng);
  v /= v.sum();
  // Push the round-off into the largest entry so the row sums to 1.
  Eigen::Index big = 0;
  v.maxCoeff(&big);
  v[big] += 1.0 - v.sum();
  return v;
}

}  // namespace

TabularMdp random_mdp(std::uint64_t seed) {
  Rng rng(mix_seed(seed));
  TabularMdp m;
  m.num_states = std::uniform_int_distribution<int>(2, 8)(rng);
  m.num_actions = std::uniform_int_distribution<int>(2, 4)(rng);
  const bool deterministic = std::bernoulli_distribution(0.5)(rng);
  std::uniform_real_distribution<double> reward(-1.0, 1.0);
  std::uniform_int_distribution<int> pick(0, m.num_states - 1);
  m.rewards.resize(m.num_states, m.num_actions);
  m.transitions.assign(m.num_states, std::vector<Vec>(m.num_actions));
  for (int s = 0; s < m.num_states; ++s) {
    for (int a = 0; a < m.num_actions; ++a) {
      m.rewards(s, a) = reward(rng);
      if (deterministic) {
        m.transitions[s][a] = Vec::Zero(m.num_states);
        m.transitions[s][a][pick(rng)] = 1.0;
      } else {
        m.transitions[s][a] = dirichlet_ones(m.num_states, rng);
      }
    }
  }
  m.gamma = 0.9;
  m.start_state = 0;
  m.validate();
  return m;
}

TabularPolicy random_reference(const TabularMdp& mdp, std::uint64_t seed) {
  Rng rng(mix_seed(seed ^ 0x5eed5eedULL));
  TabularPolicy p;
  p.probs.resize(mdp.num_states, mdp.num_actions);
  for (int s = 0; s < mdp.num_states; ++s) {
    Vec row = 0.8 * dirichlet_ones(mdp.num_actions, rng) + Vec::Constant(mdp.num_actions, 0.2 / mdp.num_actions);
    row /= row.sum();
    p.probs.row(s) = row.transpose();
  }
  return p;
}

const std::vector<std::uint64_t>& corpus_seeds() {
  static const std::vector<std::uint64_t> seeds = [] {
    std::vector<std::uint64_t> s;
    for (std::uint64_t k = 0; k < 50; ++k) s.push_back(1000 + k);
    return s;
  }();
  return seeds;
}

}  // namespace trustpcl::oracle

#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "oracle/softmax.hpp"

namespace trustpcl::oracle {

/// Reproducible random MDP: 2..8 states, 2..4 actions, rewards uniform in
/// [-1, 1], transitions deterministic or Dirichlet(1) rows (coin flip),
/// gamma = 0.9, no horizon.
TabularMdp random_mdp(std::uint64_t seed);

/// Strictly positive reference policy for `mdp`, seeded.
TabularPolicy random_reference(const TabularMdp& mdp, std::uint64_t seed);

/// The committed property-test corpus (50 seeds, mirrored in data/oracle_corpus_seeds.txt).
const std::vector<std::uint64_t>& corpus_seeds();

/// (tau, lambda) settings each corpus MDP is solved under.
inline constexpr std::array<std::pair<double, double>, 3> kCorpusSettings{{{0.1, 0.0}, {0.0, 0.5}, {0.2, 1.0}}};

}  // namespace trustpcl::oracle

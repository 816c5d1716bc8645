#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace trustpcl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Flat ordered view of every trainable scalar of a model.
using ParamVector = Eigen::VectorXd;

/// Actions are stored as vectors. Continuous actions use one entry per
/// dimension; a discrete action is a single entry holding the index.
using Action = Eigen::VectorXd;

using Rng = std::mt19937_64;

inline Action discrete_action(int index) {
  Action a(1);
  a[0] = static_cast<double>(index);
  return a;
}

inline int action_index(const Action& a) { return static_cast<int>(a[0]); }

/// splitmix64 finalizer, used to derive independent seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
  return mix_seed(mix_seed(base ^ mix_seed(stream)) + index);
}

}  // namespace trustpcl

#pragma once

#include <string>
#include <vector>

namespace trustpcl::checks {

struct GradCheckEntry {
  std::string name;
  double max_relative_error = 0.0;
  int num_params = 0;
};

struct GradCheckOptions {
  double step = 1e-5;
  double threshold = 1e-4;
  unsigned seed = 7;
  /// Test hook: perturbs one analytic gradient entry of every check.
  bool break_gradient = false;
};

/// Finite-difference checks of the Gaussian and categorical log-densities,
/// the value network, and the batch consistency loss (policy and value
/// parameters, with and without the relative-entropy term) on small random
/// models and batches.
std::vector<GradCheckEntry> run_grad_checks(const GradCheckOptions& options = {});

}  // namespace trustpcl::checks

#pragma once

#include <cstddef>
#include <vector>

#include "common/types.hpp"

namespace trustpcl::nn {

struct Layer {
  Mat weight;  // out x in
  Vec bias;    // out
};

/// Feed-forward network: tanh on every hidden layer, identity on the output.
/// Parameters flatten layer by layer, each layer as its weight in row-major
/// order followed by its bias.
class MlpParams {
 public:
  MlpParams() = default;
  /// Zero-initialized network with the given layer widths.
  MlpParams(int input_dim, const std::vector<int>& hidden, int output_dim);

  int input_dim() const;
  int output_dim() const;
  std::size_t num_params() const;
  std::vector<int> widths() const;

  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

  ParamVector flatten() const;
  void unflatten(const Eigen::Ref<const ParamVector>& flat);

  /// Scaled-uniform hidden init; output layer additionally scaled by `output_scale`.
  void initialize(Rng& rng, double output_scale = 0.01);

  bool all_finite() const;
  /// Throws ShapeError when consecutive layer shapes disagree.
  void validate() const;

 private:
  std::vector<Layer> layers_;
};

/// Activations recorded by a forward pass.
struct MlpCache {
  std::vector<Vec> layer_inputs;  // input fed to each layer
  Vec output;
};

Vec mlp_forward(const MlpParams& params, const Vec& input, MlpCache* cache = nullptr);

struct MlpGradients {
  Vec input_grad;
  ParamVector param_grads;
};

/// Gradients of output . output_grad with respect to the input and the parameters.
MlpGradients mlp_backward(const MlpParams& params, const MlpCache& cache, const Vec& output_grad);

/// Adds `scale` times the parameter gradient of output . output_grad into `grads`
/// (which must have num_params() entries). Returns the input gradient.
Vec mlp_backward_accumulate(const MlpParams& params, const MlpCache& cache, const Vec& output_grad,
                            double scale, Eigen::Ref<ParamVector> grads);

}  // namespace trustpcl::nn

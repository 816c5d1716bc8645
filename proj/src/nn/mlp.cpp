#include "nn/mlp.hpp"

#include <cmath>
#include <string>

#include "common/error.hpp"

namespace trustpcl::nn {

MlpParams::MlpParams(int input_dim, const std::vector<int>& hidden, int output_dim) {
  if (input_dim <= 0 || output_dim <= 0) {
    throw ShapeError("mlp: input and output dims must be positive");
  }
  int prev = input_dim;
  for (int width : hidden) {
    if (width <= 0) throw ShapeError("mlp: hidden widths must be positive");
    layers_.push_back({Mat::Zero(width, prev), Vec::Zero(width)});
    prev = width;
  }
  layers_.push_back({Mat::Zero(output_dim, prev), Vec::Zero(output_dim)});
}

int MlpParams::input_dim() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.front().weight.cols());
}

int MlpParams::output_dim() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.back().weight.rows());
}

std::size_t MlpParams::num_params() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

std::vector<int> MlpParams::widths() const {
  std::vector<int> w;
  if (layers_.empty()) return w;
  w.push_back(input_dim());
  for (const auto& l : layers_) w.push_back(static_cast<int>(l.weight.rows()));
  return w;
}

ParamVector MlpParams::flatten() const {
  ParamVector flat(static_cast<Eigen::Index>(num_params()));
  Eigen::Index k = 0;
  for (const auto& l : layers_) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) flat[k++] = l.weight(r, c);
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) flat[k++] = l.bias[r];
  }
  return flat;
}

void MlpParams::unflatten(const Eigen::Ref<const ParamVector>& flat) {
  if (static_cast<std::size_t>(flat.size()) != num_params()) {
    throw ShapeError("mlp: flat parameter vector has " + std::to_string(flat.size()) +
                     " entries, expected " + std::to_string(num_params()));
  }
  Eigen::Index k = 0;
  for (auto& l : layers_) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = flat[k++];
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias[r] = flat[k++];
  }
}

void MlpParams::initialize(Rng& rng, double output_scale) {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    auto& l = layers_[i];
    const double limit = std::sqrt(6.0 / static_cast<double>(l.weight.rows() + l.weight.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    const double scale = (i + 1 == layers_.size()) ? output_scale : 1.0;
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = scale * dist(rng);
    }
    l.bias.setZero();
  }
}

bool MlpParams::all_finite() const {
  for (const auto& l : layers_) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

void MlpParams::validate() const {
  if (layers_.empty()) throw ShapeError("mlp: no layers");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].bias.size() != layers_[i].weight.rows()) {
      throw ShapeError("mlp: bias/weight mismatch in layer " + std::to_string(i));
    }
    if (i > 0 && layers_[i].weight.cols() != layers_[i - 1].weight.rows()) {
      throw ShapeError("mlp: layer " + std::to_string(i) + " input dim does not match previous output");
    }
  }
}

Vec mlp_forward(const MlpParams& params, const Vec& input, MlpCache* cache) {
  const auto& layers = params.layers();
  if (layers.empty() || input.size() != layers.front().weight.cols()) {
    throw ShapeError("mlp_forward: input has " + std::to_string(input.size()) + " entries, expected " +
                     std::to_string(params.input_dim()));
  }
  if (cache) cache->layer_inputs.clear();
  Vec h = input;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (cache) cache->layer_inputs.push_back(h);
    Vec z = layers[i].weight * h + layers[i].bias;
    if (i + 1 < layers.size()) {
      h = z.array().tanh().matrix();
    } else {
      h = std::move(z);
    }
  }
  if (cache) cache->output = h;
  return h;
}

namespace {

void check_cache(const MlpParams& params, const MlpCache& cache, const Vec& output_grad) {
  const auto& layers = params.layers();
  if (cache.layer_inputs.size() != layers.size()) {
    throw ShapeError("mlp_backward: cache does not match network depth");
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (cache.layer_inputs[i].size() != layers[i].weight.cols()) {
      throw ShapeError("mlp_backward: stale cache for layer " + std::to_string(i));
    }
  }
  if (output_grad.size() != layers.back().weight.rows()) {
    throw ShapeError("mlp_backward: output_grad has wrong length");
  }
}

}  // namespace

Vec mlp_backward_accumulate(const MlpParams& params, const MlpCache& cache, const Vec& output_grad,
                            double scale, Eigen::Ref<ParamVector> grads) {
  check_cache(params, cache, output_grad);
  if (static_cast<std::size_t>(grads.size()) != params.num_params()) {
    throw ShapeError("mlp_backward: gradient buffer has wrong length");
  }
  const auto& layers = params.layers();

  // Offsets of each layer's block inside the flat vector.
  std::vector<Eigen::Index> offsets(layers.size());
  Eigen::Index off = 0;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    offsets[i] = off;
    off += layers[i].weight.size() + layers[i].bias.size();
  }

  Vec delta = output_grad;
  for (std::size_t idx = layers.size(); idx-- > 0;) {
    const auto& l = layers[idx];
    const Vec& in = cache.layer_inputs[idx];
    const Eigen::Index rows = l.weight.rows();
    const Eigen::Index cols = l.weight.cols();
    Eigen::Index k = offsets[idx];
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double d = scale * delta[r];
      grads.segment(k, cols) += d * in.transpose();
      k += cols;
    }
    grads.segment(k, rows) += scale * delta;

    Vec back = l.weight.transpose() * delta;
    if (idx > 0) {
      // `in` is the tanh output of the previous layer.
      back.array() *= (1.0 - in.array().square());
    }
    delta = std::move(back);
  }
  return delta;
}

MlpGradients mlp_backward(const MlpParams& params, const MlpCache& cache, const Vec& output_grad) {
  MlpGradients g;
  g.param_grads = ParamVector::Zero(static_cast<Eigen::Index>(params.num_params()));
  g.input_grad = mlp_backward_accumulate(params, cache, output_grad, 1.0, g.param_grads);
  return g;
}

}  // namespace trustpcl::nn

// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "lodhead/rng.hpp"

namespace lodhead {

/// Dense row-major matrix; one row per batch item.
template <class T>
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<T> data;

  Matrix() = default;
  Matrix(int r, int c, T fill = T(0)) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

  T& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  T operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  T* row(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
  const T* row(int r) const { return data.data() + static_cast<std::size_t>(r) * cols; }
};

enum class Activation : std::uint8_t { identity = 0, relu = 1, tanh = 2, sigmoid = 3, exponential = 4 };

std::string_view activation_name(Activation act);

template <class T>
struct DenseLayer {
  int in = 0;
  int out = 0;
  std::vector<T> weight;  // out x in, row-major
  std::vector<T> bias;    // out
  Activation activation = Activation::identity;
};

/// Per-parameter gradients laid out like the network; backward accumulates.
template <class T>
struct MlpGradients {
  std::vector<std::vector<T>> weight;
  std::vector<std::vector<T>> bias;

  void zero();
};

template <class T>
class Mlp {
 public:
  struct Cache {
    std::vector<Matrix<T>> inputs;   // input of layer i
    std::vector<Matrix<T>> outputs;  // activated output of layer i
  };

  Mlp() = default;
  explicit Mlp(std::vector<DenseLayer<T>> layers);

  /// dims = {in, h1, ..., out}. He-uniform for relu layers, Xavier-uniform
  /// otherwise; biases zero. The last layer's weights are scaled by output_gain.
  static Mlp create(std::span<const int> dims, Activation hidden, Activation output, Rng& rng,
                    double output_gain = 1.0);

  int input_dim() const { return layers_.empty() ? 0 : layers_.front().in; }
  int output_dim() const { return layers_.empty() ? 0 : layers_.back().out; }
  const std::vector<DenseLayer<T>>& layers() const { return layers_; }
  std::vector<DenseLayer<T>>& layers() { return layers_; }
  std::size_t parameter_count() const;

  MlpGradients<T> make_gradients() const;

  Matrix<T> forward(const Matrix<T>& x, Cache* cache = nullptr) const;

  /// Accumulates parameter gradients into `grads` and returns d loss / d input
  /// (empty when want_input_grad is false).
  Matrix<T> backward(const Cache& cache, const Matrix<T>& grad_out, MlpGradients<T>& grads,
                     bool want_input_grad = true) const;

  /// Flat views over every parameter block, in layer order (weight, bias).
  std::vector<std::span<T>> parameter_blocks();
  static std::vector<std::span<const T>> gradient_blocks(const MlpGradients<T>& g);

 private:
  std::vector<DenseLayer<T>> layers_;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected adaptive-moment optimiser over a fixed list of parameter
/// blocks. Moments are allocated on the first step.
template <class T>
class Adam {
 public:
  Adam() = default;
  explicit Adam(AdamConfig cfg) : cfg_(cfg) {}

  void step(const std::vector<std::span<T>>& params, const std::vector<std::span<const T>>& grads);

  std::int64_t steps() const { return step_; }
  const AdamConfig& config() const { return cfg_; }
  AdamConfig& config() { return cfg_; }

 private:
  AdamConfig cfg_;
  std::int64_t step_ = 0;
  std::vector<std::vector<T>> m_;
  std::vector<std::vector<T>> v_;
};

extern template class Mlp<float>;
extern template class Mlp<double>;
extern template class Adam<float>;
extern template class Adam<double>;

}  // namespace lodhead

// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#include "lodhead/nn.hpp"

#include <cmath>
#include <stdexcept>

#include "lodhead/simd/kernels.hpp"

namespace lodhead {

std::string_view activation_name(Activation act) {
  switch (act) {
    case Activation::identity:
      return "identity";
    case Activation::relu:
      return "relu";
    case Activation::tanh:
      return "tanh";
    case Activation::sigmoid:
      return "sigmoid";
    case Activation::exponential:
      return "exponential";
  }
  return "unknown";
}

namespace {

template <class T>
T activate(Activation act, T x) {
  switch (act) {
    case Activation::identity:
      return x;
    case Activation::relu:
      return x > T(0) ? x : T(0);
    case Activation::tanh:
      return std::tanh(x);
    case Activation::sigmoid:
      return T(1) / (T(1) + std::exp(-x));
    case Activation::exponential:
      return std::exp(x);
  }
  return x;
}

// Multiplies g by the activation derivative expressed through the output y.
template <class T>
void apply_slope(Activation act, const T* y, T* g, std::size_t n) {
  switch (act) {
    case Activation::identity:
      return;
    case Activation::relu:
      for (std::size_t e = 0; e < n; ++e) g[e] = y[e] > T(0) ? g[e] : T(0);
      return;
    case Activation::tanh:
      for (std::size_t e = 0; e < n; ++e) g[e] *= T(1) - y[e] * y[e];
      return;
    case Activation::sigmoid:
      for (std::size_t e = 0; e < n; ++e) g[e] *= y[e] * (T(1) - y[e]);
      return;
    case Activation::exponential:
      for (std::size_t e = 0; e < n; ++e) g[e] *= y[e];
      return;
  }
}

}  // namespace

template <class T>
void MlpGradients<T>::zero() {
  for (auto& w : weight) std::fill(w.begin(), w.end(), T(0));
  for (auto& b : bias) std::fill(b.begin(), b.end(), T(0));
}

template <class T>
Mlp<T>::Mlp(std::vector<DenseLayer<T>> layers) : layers_(std::move(layers)) {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    if (l.in < 1 || l.out < 1 || l.weight.size() != static_cast<std::size_t>(l.in) * l.out ||
        l.bias.size() != static_cast<std::size_t>(l.out))
      throw std::invalid_argument("dense layer " + std::to_string(i) + " has inconsistent shapes");
    if (i > 0 && layers_[i - 1].out != l.in)
      throw std::invalid_argument("layer " + std::to_string(i) + " input does not match previous output");
  }
}

template <class T>
Mlp<T> Mlp<T>::create(std::span<const int> dims, Activation hidden, Activation output, Rng& rng,
                      double output_gain) {
  if (dims.size() < 2) throw std::invalid_argument("an MLP needs at least input and output dims");
  std::vector<DenseLayer<T>> layers;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    DenseLayer<T> l;
    l.in = dims[i];
    l.out = dims[i + 1];
    const bool last = i + 2 == dims.size();
    l.activation = last ? output : hidden;
    const double limit = l.activation == Activation::relu ? std::sqrt(6.0 / l.in)
                                                          : std::sqrt(6.0 / (l.in + l.out));
    const double gain = last ? output_gain : 1.0;
    l.weight.resize(static_cast<std::size_t>(l.in) * l.out);
    for (T& w : l.weight) w = static_cast<T>(gain * rng.uniform(-limit, limit));
    l.bias.assign(static_cast<std::size_t>(l.out), T(0));
    layers.push_back(std::move(l));
  }
  return Mlp(std::move(layers));
}

template <class T>
std::size_t Mlp<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weight.size() + l.bias.size();
  return n;
}

template <class T>
MlpGradients<T> Mlp<T>::make_gradients() const {
  MlpGradients<T> g;
  for (const auto& l : layers_) {
    g.weight.emplace_back(l.weight.size(), T(0));
    g.bias.emplace_back(l.bias.size(), T(0));
  }
  return g;
}

template <class T>
Matrix<T> Mlp<T>::forward(const Matrix<T>& x, Cache* cache) const {
  if (x.cols != input_dim()) throw std::invalid_argument("MLP input width mismatch");
  if (cache) {
    cache->inputs.clear();
    cache->outputs.clear();
  }
  Matrix<T> cur = x;
  std::vector<T> wt;
  for (const auto& l : layers_) {
    // y = x W^T + b through the row-major gemm on W^T.
    wt.resize(l.weight.size());
    for (int o = 0; o < l.out; ++o)
      for (int i = 0; i < l.in; ++i) wt[static_cast<std::size_t>(i) * l.out + o] = l.weight[static_cast<std::size_t>(o) * l.in + i];
    Matrix<T> y(cur.rows, l.out);
    if (cur.rows > 0) simd::gemm_nn<T>(cur.rows, l.out, l.in, cur.data.data(), l.in, wt.data(), l.out, y.data.data(), l.out, false);
    for (int r = 0; r < y.rows; ++r) {
      T* yr = y.row(r);
      for (int o = 0; o < l.out; ++o) yr[o] += l.bias[static_cast<std::size_t>(o)];
    }
    if (l.activation == Activation::relu) {
      for (T& v : y.data) v = v > T(0) ? v : T(0);
    } else if (l.activation != Activation::identity) {
      for (T& v : y.data) v = activate(l.activation, v);
    }
    if (cache) {
      cache->inputs.push_back(std::move(cur));
      cache->outputs.push_back(y);
    }
    cur = std::move(y);
  }
  return cur;
}

template <class T>
Matrix<T> Mlp<T>::backward(const Cache& cache, const Matrix<T>& grad_out, MlpGradients<T>& grads,
                           bool want_input_grad) const {
  if (cache.outputs.size() != layers_.size()) throw std::invalid_argument("MLP cache does not match the network");
  if (grad_out.cols != output_dim() || grad_out.rows != cache.outputs.back().rows)
    throw std::invalid_argument("MLP output gradient shape mismatch");
  if (grads.weight.size() != layers_.size()) throw std::invalid_argument("gradient buffers do not match the network");
  Matrix<T> g = grad_out;
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const auto& l = layers_[li];
    const Matrix<T>& y = cache.outputs[li];
    const Matrix<T>& x = cache.inputs[li];
    apply_slope(l.activation, y.data.data(), g.data.data(), g.data.size());
    const int batch = g.rows;
    if (batch > 0) simd::gemm_tn<T>(l.out, l.in, batch, g.data.data(), l.out, x.data.data(), l.in, grads.weight[li].data(), l.in, true);
    auto& gb = grads.bias[li];
    for (int r = 0; r < batch; ++r) {
      const T* gr = g.row(r);
      for (int o = 0; o < l.out; ++o) gb[static_cast<std::size_t>(o)] += gr[o];
    }
    if (li == 0 && !want_input_grad) return {};
    Matrix<T> gx(batch, l.in);
    if (batch > 0) simd::gemm_nn<T>(batch, l.in, l.out, g.data.data(), l.out, l.weight.data(), l.in, gx.data.data(), l.in, false);
    g = std::move(gx);
  }
  return g;
}

template <class T>
std::vector<std::span<T>> Mlp<T>::parameter_blocks() {
  std::vector<std::span<T>> out;
  for (auto& l : layers_) {
    out.emplace_back(l.weight);
    out.emplace_back(l.bias);
  }
  return out;
}

template <class T>
std::vector<std::span<const T>> Mlp<T>::gradient_blocks(const MlpGradients<T>& g) {
  std::vector<std::span<const T>> out;
  for (std::size_t i = 0; i < g.weight.size(); ++i) {
    out.emplace_back(g.weight[i]);
    out.emplace_back(g.bias[i]);
  }
  return out;
}

template <class T>
void Adam<T>::step(const std::vector<std::span<T>>& params, const std::vector<std::span<const T>>& grads) {
  if (params.size() != grads.size()) throw std::invalid_argument("Adam: parameter/gradient block count mismatch");
  if (m_.empty()) {
    for (const auto& p : params) {
      m_.emplace_back(p.size(), T(0));
      v_.emplace_back(p.size(), T(0));
    }
  }
  if (m_.size() != params.size()) throw std::invalid_argument("Adam: parameter blocks changed between steps");
  ++step_;
  const double b1 = cfg_.beta1, b2 = cfg_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  const T lr = static_cast<T>(cfg_.learning_rate), eps = static_cast<T>(cfg_.epsilon);
  const T tb1 = static_cast<T>(b1), tb2 = static_cast<T>(b2);
  const T inv_c1 = static_cast<T>(1.0 / c1), inv_c2 = static_cast<T>(1.0 / c2);
  for (std::size_t b = 0; b < params.size(); ++b) {
    auto p = params[b];
    auto g = grads[b];
    if (p.size() != g.size() || p.size() != m_[b].size())
      throw std::invalid_argument("Adam: block " + std::to_string(b) + " size mismatch");
    T* m = m_[b].data();
    T* v = v_[b].data();
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = tb1 * m[i] + (T(1) - tb1) * g[i];
      v[i] = tb2 * v[i] + (T(1) - tb2) * g[i] * g[i];
      const T mhat = m[i] * inv_c1;
      const T vhat = v[i] * inv_c2;
      p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

template struct MlpGradients<float>;
template struct MlpGradients<double>;
template class Mlp<float>;
template class Mlp<double>;
template class Adam<float>;
template class Adam<double>;

}  // namespace lodhead

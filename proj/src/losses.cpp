// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#include "lodhead/losses.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lodhead {
namespace {

template <class T>
void require_same(const Image<T>& a, const Image<T>& b) {
  if (!a.same_shape(b))
    throw std::invalid_argument("image shapes differ: " + std::to_string(a.width) + "x" + std::to_string(a.height) +
                                " vs " + std::to_string(b.width) + "x" + std::to_string(b.height));
}

template <class T>
void prepare_grad(Image<T>* grad, const Image<T>& like) {
  if (grad && !grad->same_shape(like)) *grad = Image<T>(like.width, like.height);
}

template <class T>
T huber_value(T d, T delta) {
  const T ad = std::abs(d);
  return ad <= delta ? T(0.5) * d * d : delta * (ad - T(0.5) * delta);
}

template <class T>
T huber_slope(T d, T delta) {
  return std::abs(d) <= delta ? d : (d > 0 ? delta : -delta);
}

template <class T>
T l2_mean(const std::vector<T>& v, T scale, std::vector<T>* grad) {
  const std::size_t n = v.size() / 3;
  if (grad) grad->assign(v.size(), T(0));
  if (n == 0) return T(0);
  T sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const T len = std::sqrt(v[3 * i] * v[3 * i] + v[3 * i + 1] * v[3 * i + 1] + v[3 * i + 2] * v[3 * i + 2]);
    sum += len;
    if (grad && len > T(0))
      for (int a = 0; a < 3; ++a) (*grad)[3 * i + a] = scale * v[3 * i + a] / (len * static_cast<T>(n));
  }
  return sum / static_cast<T>(n);
}

}  // namespace

void LossWeights::validate() const {
  if (!(parts >= 0) || !(lpips >= 0) || !(mu >= 0) || !(s >= 0))
    throw std::invalid_argument("loss weights must be non-negative");
  if (!(huber_delta > 0)) throw std::invalid_argument("huber_delta must be positive");
}

template <class T>
T huber(const Image<T>& a, const Image<T>& b, double delta, Image<T>* grad_b, T scale) {
  require_same(a, b);
  prepare_grad(grad_b, b);
  if (a.data.empty()) return T(0);
  const T dl = static_cast<T>(delta), inv_n = T(1) / static_cast<T>(a.data.size());
  T sum = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const T d = b.data[i] - a.data[i];
    sum += huber_value(d, dl);
    if (grad_b) grad_b->data[i] += scale * inv_n * huber_slope(d, dl);
  }
  return sum * inv_n;
}

template <class T>
T masked_huber(const Image<T>& target, const Image<T>& rendered, const PixelMask& mask, double delta,
               Image<T>* grad_rendered, T scale) {
  require_same(target, rendered);
  if (mask.width != target.width || mask.height != target.height)
    throw std::invalid_argument("mask shape does not match the images");
  prepare_grad(grad_rendered, rendered);
  if (target.data.empty()) return T(0);
  const T dl = static_cast<T>(delta), inv_n = T(1) / static_cast<T>(target.data.size());
  T sum = 0;
  for (std::size_t p = 0; p < mask.data.size(); ++p) {
    if (!mask.data[p]) continue;
    for (int c = 0; c < 3; ++c) {
      const std::size_t i = 3 * p + c;
      const T d = rendered.data[i] - target.data[i];
      sum += huber_value(d, dl);
      if (grad_rendered) grad_rendered->data[i] += scale * inv_n * huber_slope(d, dl);
    }
  }
  return sum * inv_n;
}

template <class T>
T rgb_loss(const Image<T>& target, const Image<T>& rendered, const PixelMask& mask, const LossWeights& w,
           Image<T>* grad_rendered) {
  const T full = huber(target, rendered, w.huber_delta, grad_rendered);
  const T parts = masked_huber(target, rendered, mask, w.huber_delta, grad_rendered, static_cast<T>(w.parts));
  return full + static_cast<T>(w.parts) * parts;
}

template <class T>
LossTerms<T> total_loss(const Image<T>& target, const Image<T>& rendered, const PixelMask& mask,
                        const std::vector<T>& offsets, const std::vector<T>& scales, double lod, const LossWeights& w,
                        LossGradients<T>* grads, const PerceptualHook<T>& perceptual) {
  w.validate();
  if (offsets.size() % 3 != 0 || scales.size() % 3 != 0) throw std::invalid_argument("attribute arrays must be 3n");
  LossTerms<T> t;
  Image<T>* gimg = grads ? &grads->rendered : nullptr;
  if (gimg) *gimg = Image<T>(rendered.width, rendered.height);
  t.full = huber(target, rendered, w.huber_delta, gimg);
  t.parts = masked_huber(target, rendered, mask, w.huber_delta, gimg, static_cast<T>(w.parts));
  t.rgb = t.full + static_cast<T>(w.parts) * t.parts;
  if (perceptual && w.lpips > 0) {
    Image<T> g;
    if (gimg) g = Image<T>(rendered.width, rendered.height);
    t.lpips = perceptual(target, rendered, gimg ? &g : nullptr);
    if (gimg)
      for (std::size_t i = 0; i < g.data.size(); ++i) gimg->data[i] += static_cast<T>(w.lpips) * g.data[i];
  }
  const T ws = static_cast<T>(scale_weight(w, lod));
  t.mu = l2_mean(offsets, static_cast<T>(w.mu), grads ? &grads->offsets : nullptr);
  t.s = l2_mean(scales, ws, grads ? &grads->scales : nullptr);
  t.total = t.rgb + static_cast<T>(w.lpips) * t.lpips + static_cast<T>(w.mu) * t.mu + ws * t.s;
  return t;
}

#define LODHEAD_INSTANTIATE_LOSSES(T)                                                                           \
  template T huber<T>(const Image<T>&, const Image<T>&, double, Image<T>*, T);                                  \
  template T masked_huber<T>(const Image<T>&, const Image<T>&, const PixelMask&, double, Image<T>*, T);         \
  template T rgb_loss<T>(const Image<T>&, const Image<T>&, const PixelMask&, const LossWeights&, Image<T>*);    \
  template LossTerms<T> total_loss<T>(const Image<T>&, const Image<T>&, const PixelMask&, const std::vector<T>&, \
                                      const std::vector<T>&, double, const LossWeights&, LossGradients<T>*,     \
                                      const PerceptualHook<T>&);

LODHEAD_INSTANTIATE_LOSSES(float)
LODHEAD_INSTANTIATE_LOSSES(double)

}  // namespace lodhead

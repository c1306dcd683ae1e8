// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <vector>

#include "lodhead/image.hpp"
#include "lodhead/splat.hpp"

namespace lodhead {

struct LossWeights {
  double parts = 20.0;
  double lpips = 0.05;
  double mu = 0.001;
  double s = 0.5;
  double huber_delta = 0.1;

  void validate() const;  // throws std::invalid_argument
};

/// Optional perceptual term: returns a scalar and, when `grad` is non-null,
/// adds d term / d rendered into it. Empty hook means the term is zero.
template <class T>
using PerceptualHook = std::function<T(const Image<T>& target, const Image<T>& rendered, Image<T>* grad)>;

/// Mean Huber penalty over every element. When grad_b is given, adds
/// scale * d/d b into it.
template <class T>
T huber(const Image<T>& a, const Image<T>& b, double delta, Image<T>* grad_b = nullptr, T scale = T(1));

/// Huber between mask-multiplied images; the mean still runs over all
/// elements. Gradient is taken with respect to `rendered`.
template <class T>
T masked_huber(const Image<T>& target, const Image<T>& rendered, const PixelMask& mask, double delta,
               Image<T>* grad_rendered = nullptr, T scale = T(1));

template <class T>
struct LossTerms {
  T full = 0;    // Huber on whole images
  T parts = 0;   // Huber on masked images (unweighted)
  T rgb = 0;     // full + parts weight * parts
  T lpips = 0;
  T mu = 0;      // mean |delta mu|
  T s = 0;       // mean |s|
  T total = 0;
};

template <class T>
T rgb_loss(const Image<T>& target, const Image<T>& rendered, const PixelMask& mask, const LossWeights& w,
           Image<T>* grad_rendered = nullptr);

/// Coefficient applied to the scale regulariser at a given LOD.
inline double scale_weight(const LossWeights& w, double lod) { return w.s * (1.0 - 0.5 * lod); }

/// Gradients of the total loss w.r.t. its inputs (each optional).
template <class T>
struct LossGradients {
  Image<T> rendered;
  std::vector<T> offsets;  // 3n
  std::vector<T> scales;   // 3n
};

/// rgb + lpips weight * perceptual + mu weight * mean|delta mu| +
/// s weight * (1 - 0.5 lod) * mean|s|.
template <class T>
LossTerms<T> total_loss(const Image<T>& target, const Image<T>& rendered, const PixelMask& mask,
                        const std::vector<T>& offsets, const std::vector<T>& scales, double lod, const LossWeights& w,
                        LossGradients<T>* grads = nullptr, const PerceptualHook<T>& perceptual = {});

}  // namespace lodhead

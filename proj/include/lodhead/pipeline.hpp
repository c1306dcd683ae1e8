// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "lodhead/decoder.hpp"
#include "lodhead/model.hpp"
#include "lodhead/splat.hpp"

namespace lodhead {

enum class Rasterizer { tiled, reference };

/// Everything produced while rendering one frame at one LOD, kept for the
/// backward pass.
template <class T>
struct FrameForward {
  double lod = 0;
  int resolution = 0;
  UVPositionMap pmap;
  DecodeParams params;
  FeatureMap<T> features;
  std::vector<T> code;
  typename Mlp<T>::Cache mapper_cache;
  LatentMap<T> latent;
  DecodeCache<T> decode_cache;
  Decoded<T> decoded;
  RenderResult<T> render;
};

/// resample -> position map -> encode -> assemble -> decode -> rasterize.
template <class T>
FrameForward<T> forward_frame(const AvatarModel<T>& model, const ExpressionVector& expr, const Camera& cam,
                              double lod, const RenderSettings& settings = {},
                              Rasterizer rasterizer = Rasterizer::tiled);

/// Decoded Gaussians only, without rendering.
template <class T>
Decoded<T> decode_frame(const AvatarModel<T>& model, const ExpressionVector& expr, double lod);

/// Accumulates into `grads` the gradient of a loss whose partials are
/// `grad_image` (on the unclamped render), `grad_offsets` and `grad_scales`
/// (either may be empty). The mapper gradient is skipped unless `with_mapper`.
template <class T>
void backward_frame(const AvatarModel<T>& model, const FrameForward<T>& fwd, const Camera& cam,
                    const RenderSettings& settings, const Image<T>& grad_image, const std::vector<T>& grad_offsets,
                    const std::vector<T>& grad_scales, ModelGradients<T>& grads, bool with_mapper = true);

}  // namespace lodhead

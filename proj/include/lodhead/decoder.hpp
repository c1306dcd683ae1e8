// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lodhead/geometry.hpp"
#include "lodhead/nn.hpp"
#include "lodhead/splat.hpp"
#include "lodhead/uv_field.hpp"

namespace lodhead {

struct DecoderConfig {
  int feature_dim = 64;
  int n_freq = 12;
  int driving_dim = 20;
  int expr_dim = kDefaultExpressionDim;
  int mapper_hidden = 64;
  int hidden_width = 128;
  int hidden_layers = 3;
  int sh_degree = kMaxShDegree;
  double output_gain = 0.1;

  int latent_channels() const { return encoded_channels(n_freq) + feature_dim + driving_dim + 1; }
};

enum Head : int { kOffsetHead = 0, kScaleHead = 1, kRotationHead = 2, kOpacityHead = 3, kColorHead = 4 };
inline constexpr int kHeadCount = 5;

int head_output_dim(Head head, int sh_degree);

/// Expression -> driving code network (tanh hidden, identity output).
template <class T>
Mlp<T> make_mapper(const DecoderConfig& cfg, Rng& rng);

/// The five attribute heads (relu hidden, identity output).
template <class T>
std::array<Mlp<T>, kHeadCount> make_heads(const DecoderConfig& cfg, Rng& rng);

template <class T>
std::vector<T> map_driving_code(const Mlp<T>& mapper, const ExpressionVector& expr,
                                typename Mlp<T>::Cache* cache = nullptr);

/// Per-texel latent [encoding | features | driving code | lod]; uncovered
/// texels are all zero.
template <class T>
struct LatentMap {
  FeatureMap<T> values;
  std::vector<std::uint8_t> mask;
};

template <class T>
LatentMap<T> assemble_latent(const FeatureMap<T>& features, const FeatureMap<T>& encoding,
                             const std::vector<T>& code, double lod, const std::vector<std::uint8_t>& mask);

struct DecodeParams {
  double offset_scale = 0.1;  // |delta mu| bound per component
  double scale_base = 0.01;   // scale at zero pre-activation
};

template <class T>
struct Decoded {
  GaussianSet<T> gaussians;
  std::vector<T> offsets;               // delta mu, 3n
  std::vector<std::uint32_t> texels;    // source texel of each Gaussian
};

template <class T>
struct DecodeCache {
  Matrix<T> batch;  // latent rows of covered texels
  std::array<typename Mlp<T>::Cache, kHeadCount> heads;
  std::array<Matrix<T>, kHeadCount> raw;
};

/// Per covered texel: mu = mu_init + offset_scale tanh(raw), s = scale_base
/// exp(raw), q = normalize(raw + (1,0,0,0)), alpha = sigmoid(raw), c = raw.
template <class T>
Decoded<T> decode(const LatentMap<T>& latent, const UVPositionMap& pmap, const std::array<Mlp<T>, kHeadCount>& heads,
                  const DecodeParams& params, int sh_degree, DecodeCache<T>* cache = nullptr);

/// Backpropagates attribute gradients (plus an optional extra gradient on the
/// offsets) into the heads; returns d loss / d latent rows (covered texels).
template <class T>
Matrix<T> decode_backward(const std::array<Mlp<T>, kHeadCount>& heads, const DecodeCache<T>& cache,
                          const Decoded<T>& decoded, const GaussianSet<T>& grad, const std::vector<T>& grad_offsets,
                          const DecodeParams& params, std::array<MlpGradients<T>, kHeadCount>& head_grads);

}  // namespace lodhead

// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#include "lodhead/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lodhead {

int head_output_dim(Head head, int sh_degree) {
  switch (head) {
    case kOffsetHead:
    case kScaleHead:
      return 3;
    case kRotationHead:
      return 4;
    case kOpacityHead:
      return 1;
    case kColorHead:
      return sh_coeff_count(sh_degree);
  }
  return 0;
}

// Largest |logit| for which sigmoid stays strictly inside (0, 1), and the
// largest |exponent| whose exp stays finite and positive, per precision.
template <class T>
constexpr T opacity_logit_limit() {
  return sizeof(T) == sizeof(float) ? T(15) : T(30);
}
template <class T>
constexpr T scale_exponent_limit() {
  return sizeof(T) == sizeof(float) ? T(40) : T(300);
}

template <class T>
Mlp<T> make_mapper(const DecoderConfig& cfg, Rng& rng) {
  const int dims[] = {cfg.expr_dim, cfg.mapper_hidden, cfg.driving_dim};
  return Mlp<T>::create(dims, Activation::tanh, Activation::identity, rng);
}

template <class T>
std::array<Mlp<T>, kHeadCount> make_heads(const DecoderConfig& cfg, Rng& rng) {
  std::array<Mlp<T>, kHeadCount> heads;
  for (int h = 0; h < kHeadCount; ++h) {
    std::vector<int> dims{cfg.latent_channels()};
    for (int l = 0; l < cfg.hidden_layers; ++l) dims.push_back(cfg.hidden_width);
    dims.push_back(head_output_dim(static_cast<Head>(h), cfg.sh_degree));
    heads[h] = Mlp<T>::create(dims, Activation::relu, Activation::identity, rng, cfg.output_gain);
  }
  return heads;
}

template <class T>
std::vector<T> map_driving_code(const Mlp<T>& mapper, const ExpressionVector& expr, typename Mlp<T>::Cache* cache) {
  if (static_cast<int>(expr.size()) != mapper.input_dim())
    throw std::invalid_argument("expression has " + std::to_string(expr.size()) + " dims, mapper expects " +
                                std::to_string(mapper.input_dim()));
  Matrix<T> x(1, mapper.input_dim());
  for (std::size_t i = 0; i < expr.size(); ++i) x.data[i] = static_cast<T>(expr[i]);
  return mapper.forward(x, cache).data;
}

template <class T>
LatentMap<T> assemble_latent(const FeatureMap<T>& features, const FeatureMap<T>& encoding, const std::vector<T>& code,
                             double lod, const std::vector<std::uint8_t>& mask) {
  if (features.resolution != encoding.resolution)
    throw std::invalid_argument("feature map and position encoding resolutions differ");
  if (mask.size() != features.texel_count()) throw std::invalid_argument("mask size does not match the feature map");
  const int pe = encoding.channels, df = features.channels, k = static_cast<int>(code.size());
  LatentMap<T> out{FeatureMap<T>(features.resolution, pe + df + k + 1), mask};
  const int ch = out.values.channels;
  for (std::size_t t = 0; t < mask.size(); ++t) {
    if (!mask[t]) continue;
    T* dst = out.values.data.data() + t * ch;
    std::copy_n(encoding.data.data() + t * pe, pe, dst);
    std::copy_n(features.data.data() + t * df, df, dst + pe);
    std::copy_n(code.data(), k, dst + pe + df);
    dst[ch - 1] = static_cast<T>(lod);
  }
  return out;
}

template <class T>
Decoded<T> decode(const LatentMap<T>& latent, const UVPositionMap& pmap, const std::array<Mlp<T>, kHeadCount>& heads,
                  const DecodeParams& params, int sh_degree, DecodeCache<T>* cache) {
  const int ch = latent.values.channels;
  if (latent.values.resolution != pmap.resolution) throw std::invalid_argument("latent and position map resolutions differ");
  for (int h = 0; h < kHeadCount; ++h) {
    if (heads[h].input_dim() != ch) throw std::invalid_argument("decoder head input does not match latent channels");
    if (heads[h].output_dim() != head_output_dim(static_cast<Head>(h), sh_degree))
      throw std::invalid_argument("decoder head output width is wrong");
  }

  Decoded<T> out;
  for (std::size_t t = 0; t < pmap.mask.size(); ++t)
    if (pmap.mask[t]) out.texels.push_back(static_cast<std::uint32_t>(t));
  const int n = static_cast<int>(out.texels.size());
  Matrix<T> batch(n, ch);
  for (int r = 0; r < n; ++r) std::copy_n(latent.values.data.data() + std::size_t(out.texels[r]) * ch, ch, batch.row(r));

  std::array<Matrix<T>, kHeadCount> raw;
  std::array<typename Mlp<T>::Cache, kHeadCount> head_cache;
  for (int h = 0; h < kHeadCount; ++h) raw[h] = heads[h].forward(batch, cache ? &head_cache[h] : nullptr);

  GaussianSet<T>& g = out.gaussians;
  g.sh_degree = sh_degree;
  g.resize(static_cast<std::size_t>(n));
  out.offsets.assign(3 * static_cast<std::size_t>(n), T(0));
  const T off = static_cast<T>(params.offset_scale), base = static_cast<T>(params.scale_base);
  const int stride = g.sh_stride();
  for (int r = 0; r < n; ++r) {
    const Vec3& init = pmap.positions[out.texels[r]];
    for (int a = 0; a < 3; ++a) {
      out.offsets[3 * r + a] = off * std::tanh(raw[kOffsetHead](r, a));
      g.means[3 * r + a] = static_cast<T>(init[a]) + out.offsets[3 * r + a];
      const T ls = scale_exponent_limit<T>();
      g.scales[3 * r + a] = base * std::exp(std::clamp(raw[kScaleHead](r, a), -ls, ls));
    }
    T q[4] = {raw[kRotationHead](r, 0) + T(1), raw[kRotationHead](r, 1), raw[kRotationHead](r, 2),
              raw[kRotationHead](r, 3)};
    const T qn = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
    for (int a = 0; a < 4; ++a) g.rotations[4 * r + a] = q[a] / qn;
    const T lo = opacity_logit_limit<T>();
    g.opacities[r] = T(1) / (T(1) + std::exp(-std::clamp(raw[kOpacityHead](r, 0), -lo, lo)));
    std::copy_n(raw[kColorHead].row(r), stride, &g.sh[static_cast<std::size_t>(r) * stride]);
  }
  if (cache) {
    cache->batch = std::move(batch);
    cache->heads = std::move(head_cache);
    cache->raw = std::move(raw);
  }
  return out;
}

template <class T>
Matrix<T> decode_backward(const std::array<Mlp<T>, kHeadCount>& heads, const DecodeCache<T>& cache,
                          const Decoded<T>& decoded, const GaussianSet<T>& grad, const std::vector<T>& grad_offsets,
                          const DecodeParams& params, std::array<MlpGradients<T>, kHeadCount>& head_grads) {
  const GaussianSet<T>& g = decoded.gaussians;
  const int n = static_cast<int>(g.size());
  if (grad.size() != g.size()) throw std::invalid_argument("Gaussian gradient count mismatch");
  if (!grad_offsets.empty() && grad_offsets.size() != 3 * g.size())
    throw std::invalid_argument("offset gradient size mismatch");
  const T off = static_cast<T>(params.offset_scale);
  const int stride = g.sh_stride();

  std::array<Matrix<T>, kHeadCount> graw;
  for (int h = 0; h < kHeadCount; ++h) graw[h] = Matrix<T>(n, cache.raw[h].cols);
  for (int r = 0; r < n; ++r) {
    for (int a = 0; a < 3; ++a) {
      T gd = grad.means[3 * r + a];
      if (!grad_offsets.empty()) gd += grad_offsets[3 * r + a];
      const T th = decoded.offsets[3 * r + a] / off;
      graw[kOffsetHead](r, a) = gd * off * (T(1) - th * th);
      const T rs = cache.raw[kScaleHead](r, a);
      graw[kScaleHead](r, a) =
          std::abs(rs) < scale_exponent_limit<T>() ? grad.scales[3 * r + a] * g.scales[3 * r + a] : T(0);
    }
    const T* raw_q = cache.raw[kRotationHead].row(r);
    const T v[4] = {raw_q[0] + T(1), raw_q[1], raw_q[2], raw_q[3]};
    const T len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
    const T* qn = &g.rotations[4 * r];
    const T* gq = &grad.rotations[4 * r];
    const T dot = qn[0] * gq[0] + qn[1] * gq[1] + qn[2] * gq[2] + qn[3] * gq[3];
    for (int a = 0; a < 4; ++a) graw[kRotationHead](r, a) = (gq[a] - qn[a] * dot) / len;
    const T alpha = g.opacities[r];
    graw[kOpacityHead](r, 0) = std::abs(cache.raw[kOpacityHead](r, 0)) < opacity_logit_limit<T>()
                                   ? grad.opacities[r] * alpha * (T(1) - alpha)
                                   : T(0);
    std::copy_n(&grad.sh[static_cast<std::size_t>(r) * stride], stride, graw[kColorHead].row(r));
  }

  Matrix<T> grad_latent(n, cache.batch.cols);
  for (int h = 0; h < kHeadCount; ++h) {
    const Matrix<T> gx = heads[h].backward(cache.heads[h], graw[h], head_grads[h], true);
    for (std::size_t e = 0; e < gx.data.size(); ++e) grad_latent.data[e] += gx.data[e];
  }
  return grad_latent;
}

#define LODHEAD_INSTANTIATE_DECODER(T)                                                                            \
  template Mlp<T> make_mapper<T>(const DecoderConfig&, Rng&);                                                     \
  template std::array<Mlp<T>, kHeadCount> make_heads<T>(const DecoderConfig&, Rng&);                              \
  template std::vector<T> map_driving_code<T>(const Mlp<T>&, const ExpressionVector&, typename Mlp<T>::Cache*);  \
  template LatentMap<T> assemble_latent<T>(const FeatureMap<T>&, const FeatureMap<T>&, const std::vector<T>&,     \
                                           double, const std::vector<std::uint8_t>&);                             \
  template Decoded<T> decode<T>(const LatentMap<T>&, const UVPositionMap&, const std::array<Mlp<T>, kHeadCount>&, \
                                const DecodeParams&, int, DecodeCache<T>*);                                       \
  template Matrix<T> decode_backward<T>(const std::array<Mlp<T>, kHeadCount>&, const DecodeCache<T>&,             \
                                        const Decoded<T>&, const GaussianSet<T>&, const std::vector<T>&,          \
                                        const DecodeParams&, std::array<MlpGradients<T>, kHeadCount>&);

LODHEAD_INSTANTIATE_DECODER(float)
LODHEAD_INSTANTIATE_DECODER(double)

}  // namespace lodhead

// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#include "lodhead/pipeline.hpp"

#include <stdexcept>

namespace lodhead {
namespace {

template <class T>
void decode_into(const AvatarModel<T>& model, const ExpressionVector& expr, double lod, FrameForward<T>& f,
                 bool keep_cache) {
  if (!(lod >= 0.0 && lod <= 1.0)) throw std::invalid_argument("lod must lie in [0, 1]");
  const DecoderConfig& dc = model.config.decoder;
  f.lod = lod;
  f.resolution = model.field.resolution_for(lod);
  const LodGeometry& geo = model.geometry(f.resolution);
  f.params = geo.params;
  f.pmap = apply_binding(geo.binding, deform(model.mesh, expr));
  f.features = model.field.resample(lod);
  f.code = map_driving_code(model.mapper, expr, keep_cache ? &f.mapper_cache : nullptr);
  const FeatureMap<T> enc = positional_encode<T>(f.pmap, dc.n_freq, model.normalizer());
  f.latent = assemble_latent(f.features, enc, f.code, lod, f.pmap.mask);
  f.decoded = decode(f.latent, f.pmap, model.heads, f.params, dc.sh_degree, keep_cache ? &f.decode_cache : nullptr);
}

}  // namespace

template <class T>
FrameForward<T> forward_frame(const AvatarModel<T>& model, const ExpressionVector& expr, const Camera& cam,
                              double lod, const RenderSettings& settings, Rasterizer rasterizer) {
  FrameForward<T> f;
  decode_into(model, expr, lod, f, true);
  f.render = rasterizer == Rasterizer::tiled ? render(f.decoded.gaussians, cam, settings)
                                             : render_reference(f.decoded.gaussians, cam, settings);
  return f;
}

template <class T>
Decoded<T> decode_frame(const AvatarModel<T>& model, const ExpressionVector& expr, double lod) {
  FrameForward<T> f;
  decode_into(model, expr, lod, f, false);
  return std::move(f.decoded);
}

template <class T>
void backward_frame(const AvatarModel<T>& model, const FrameForward<T>& fwd, const Camera& cam,
                    const RenderSettings& settings, const Image<T>& grad_image, const std::vector<T>& grad_offsets,
                    const std::vector<T>& grad_scales, ModelGradients<T>& grads, bool with_mapper) {
  GaussianSet<T> g = render_backward(fwd.decoded.gaussians, cam, settings, fwd.render, grad_image);
  if (!grad_scales.empty()) {
    if (grad_scales.size() != g.scales.size()) throw std::invalid_argument("scale gradient size mismatch");
    for (std::size_t i = 0; i < grad_scales.size(); ++i) g.scales[i] += grad_scales[i];
  }
  const Matrix<T> grad_latent =
      decode_backward(model.heads, fwd.decode_cache, fwd.decoded, g, grad_offsets, fwd.params, grads.heads);

  const int pe = encoded_channels(model.config.decoder.n_freq);
  const int df = fwd.features.channels;
  const int k = static_cast<int>(fwd.code.size());
  FeatureMap<T> grad_features(fwd.features.resolution, df);
  Matrix<T> grad_code(1, k);
  for (int r = 0; r < grad_latent.rows; ++r) {
    const T* row = grad_latent.row(r);
    T* dst = grad_features.data.data() + static_cast<std::size_t>(fwd.decoded.texels[r]) * df;
    for (int c = 0; c < df; ++c) dst[c] += row[pe + c];
    for (int c = 0; c < k; ++c) grad_code.data[c] += row[pe + df + c];
  }
  if (with_mapper) model.mapper.backward(fwd.mapper_cache, grad_code, grads.mapper, false);
  const auto level_grads = model.field.resample_backward(fwd.lod, grad_features);
  for (std::size_t i = 0; i < level_grads.size(); ++i)
    for (std::size_t e = 0; e < level_grads[i].data.size(); ++e) grads.field[i].data[e] += level_grads[i].data[e];
}

#define LODHEAD_INSTANTIATE_PIPELINE(T)                                                                        \
  template FrameForward<T> forward_frame<T>(const AvatarModel<T>&, const ExpressionVector&, const Camera&,     \
                                            double, const RenderSettings&, Rasterizer);                        \
  template Decoded<T> decode_frame<T>(const AvatarModel<T>&, const ExpressionVector&, double);                 \
  template void backward_frame<T>(const AvatarModel<T>&, const FrameForward<T>&, const Camera&,                \
                                  const RenderSettings&, const Image<T>&, const std::vector<T>&,               \
                                  const std::vector<T>&, ModelGradients<T>&, bool);

LODHEAD_INSTANTIATE_PIPELINE(float)
LODHEAD_INSTANTIATE_PIPELINE(double)

}  // namespace lodhead

// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#include "lodhead/model.hpp"

#include <cstring>
#include <string>

#include "lodhead/errors.hpp"
#include "lodhead/rng.hpp"

namespace lodhead {

void ModelConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (s_min < 1) fail("s_min must be at least 1 (got " + std::to_string(s_min) + ")");
  if (s_min > s_max)
    fail("s_min (" + std::to_string(s_min) + ") must not exceed s_max (" + std::to_string(s_max) + ")");
  if (field_levels < 2) fail("field_levels must be at least 2");
  if (field_levels > s_max - s_min + 1)
    fail("field_levels (" + std::to_string(field_levels) + ") exceeds the number of distinct resolutions in [s_min, s_max]");
  if (!(tau > 0)) fail("tau must be positive");
  if (!(offset_fraction > 0)) fail("offset_fraction must be positive");
  const DecoderConfig& d = decoder;
  if (d.feature_dim < 1) fail("feature_dim must be positive");
  if (d.n_freq < 0) fail("n_freq must be non-negative");
  if (d.driving_dim < 1) fail("driving_dim must be positive");
  if (d.expr_dim < 1) fail("expr_dim must be positive");
  if (d.mapper_hidden < 1) fail("mapper_hidden must be positive");
  if (d.hidden_width < 1 || d.hidden_layers < 1) fail("hidden_width and hidden_layers must be positive");
  if (d.sh_degree < 0 || d.sh_degree > kMaxShDegree) fail("sh_degree must be in [0, 3]");
  if (!(d.output_gain > 0)) fail("output_gain must be positive");
  const auto levels = level_resolutions();
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (levels[i] <= levels[i - 1]) fail("field levels between s_min and s_max collapse; use fewer field_levels");
}

template <class T>
AvatarModel<T> AvatarModel<T>::create(const ModelConfig& cfg, Mesh mesh) {
  cfg.validate();
  mesh.validate();
  AvatarModel m;
  m.config = cfg;
  m.mesh = std::move(mesh);
  const auto levels = cfg.level_resolutions();
  m.field = FeatureField<T>::random(levels, cfg.decoder.feature_dim, cfg.tau, cfg.seed);
  Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  m.mapper = make_mapper<T>(cfg.decoder, rng);
  m.heads = make_heads<T>(cfg.decoder, rng);
  return m;
}

template <class T>
void AvatarModel<T>::check_consistency() const {
  config.validate();
  const auto want = config.level_resolutions();
  if (field.resolutions() != want) throw ConfigError("feature field levels do not match s_min/s_max/field_levels");
  if (field.channels() != config.decoder.feature_dim) throw ConfigError("feature field channels do not match feature_dim");
  if (field.tau() != config.tau) throw ConfigError("feature field tau does not match config");
  if (mapper.input_dim() != config.decoder.expr_dim || mapper.output_dim() != config.decoder.driving_dim)
    throw ConfigError("mapping network shape does not match expr_dim/driving_dim");
  for (int h = 0; h < kHeadCount; ++h) {
    if (heads[h].input_dim() != config.decoder.latent_channels())
      throw ConfigError("decoder head input does not match the latent channel count");
    if (heads[h].output_dim() != head_output_dim(static_cast<Head>(h), config.decoder.sh_degree))
      throw ConfigError("decoder head output does not match its attribute");
  }
}

template <class T>
const LodGeometry& AvatarModel<T>::geometry(int resolution) const {
  auto it = geometry_cache_.find(resolution);
  if (it != geometry_cache_.end()) return *it->second;
  auto g = std::make_shared<LodGeometry>();
  g->binding = bind_uv(mesh, resolution);
  g->rest = apply_binding(g->binding, mesh.vertices);
  g->params.offset_scale = config.offset_fraction * normalizer().radius;
  const double spacing = mean_texel_spacing(g->rest);
  g->params.scale_base = spacing > 0 ? spacing : normalizer().radius / resolution;
  return *geometry_cache_.emplace(resolution, std::move(g)).first->second;
}

template <class T>
std::size_t AvatarModel<T>::parameter_count() const {
  std::size_t n = mapper.parameter_count();
  for (const auto& h : heads) n += h.parameter_count();
  for (const auto& l : field.levels()) n += l.data.size();
  return n;
}

template <class T>
ModelGradients<T> ModelGradients<T>::zeros_like(const AvatarModel<T>& model) {
  ModelGradients g;
  for (const auto& l : model.field.levels()) g.field.emplace_back(l.resolution, l.channels);
  g.mapper = model.mapper.make_gradients();
  for (int h = 0; h < kHeadCount; ++h) g.heads[h] = model.heads[h].make_gradients();
  return g;
}

template <class T>
void ModelGradients<T>::zero() {
  for (auto& l : field) std::fill(l.data.begin(), l.data.end(), T(0));
  mapper.zero();
  for (auto& h : heads) h.zero();
}

namespace {
template <class T>
void add_into(std::vector<T>& dst, const std::vector<T>& src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}
template <class T>
void add_into(MlpGradients<T>& dst, const MlpGradients<T>& src) {
  for (std::size_t l = 0; l < dst.weight.size(); ++l) {
    add_into(dst.weight[l], src.weight[l]);
    add_into(dst.bias[l], src.bias[l]);
  }
}
}  // namespace

template <class T>
void ModelGradients<T>::add(const ModelGradients& other) {
  for (std::size_t i = 0; i < field.size(); ++i) add_into(field[i].data, other.field[i].data);
  add_into(mapper, other.mapper);
  for (int h = 0; h < kHeadCount; ++h) add_into(heads[h], other.heads[h]);
}

template <class T>
std::vector<std::span<const T>> ModelGradients<T>::field_blocks() const {
  std::vector<std::span<const T>> out;
  for (const auto& l : field) out.emplace_back(l.data);
  return out;
}

template <class T>
std::vector<std::span<const T>> ModelGradients<T>::network_blocks(bool include_mapper) const {
  std::vector<std::span<const T>> out;
  if (include_mapper) {
    auto m = Mlp<T>::gradient_blocks(mapper);
    out.insert(out.end(), m.begin(), m.end());
  }
  for (const auto& h : heads) {
    auto b = Mlp<T>::gradient_blocks(h);
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

template <class T>
std::vector<std::span<T>> field_parameter_blocks(AvatarModel<T>& model) {
  std::vector<std::span<T>> out;
  for (auto& l : model.field.levels()) out.emplace_back(l.data);
  return out;
}

template <class T>
std::vector<std::span<T>> network_parameter_blocks(AvatarModel<T>& model, bool include_mapper) {
  std::vector<std::span<T>> out;
  if (include_mapper) {
    auto m = model.mapper.parameter_blocks();
    out.insert(out.end(), m.begin(), m.end());
  }
  for (auto& h : model.heads) {
    auto b = h.parameter_blocks();
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

template <class T>
std::uint64_t mapper_hash(const AvatarModel<T>& model) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](const std::vector<T>& v) {
    const auto* p = reinterpret_cast<const unsigned char*>(v.data());
    for (std::size_t i = 0; i < v.size() * sizeof(T); ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& layer : model.mapper.layers()) {
    mix(layer.weight);
    mix(layer.bias);
  }
  return h;
}

template class AvatarModel<float>;
template class AvatarModel<double>;
template struct ModelGradients<float>;
template struct ModelGradients<double>;
template std::vector<std::span<float>> field_parameter_blocks<float>(AvatarModel<float>&);
template std::vector<std::span<double>> field_parameter_blocks<double>(AvatarModel<double>&);
template std::vector<std::span<float>> network_parameter_blocks<float>(AvatarModel<float>&, bool);
template std::vector<std::span<double>> network_parameter_blocks<double>(AvatarModel<double>&, bool);
template std::uint64_t mapper_hash<float>(const AvatarModel<float>&);
template std::uint64_t mapper_hash<double>(const AvatarModel<double>&);

}  // namespace lodhead

// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "lodhead/decoder.hpp"
#include "lodhead/geometry.hpp"
#include "lodhead/nn.hpp"
#include "lodhead/uv_field.hpp"

namespace lodhead {

struct ModelConfig {
  int s_max = 256;
  int s_min = 64;
  int field_levels = 3;
  double tau = 0.35;
  double offset_fraction = 0.1;  // offset bound as a fraction of the bounding-sphere radius
  DecoderConfig decoder;
  std::uint64_t seed = 1;

  /// Throws ConfigError naming the offending fields.
  void validate() const;
  std::vector<int> level_resolutions() const { return geometric_levels(s_min, s_max, field_levels); }
};

/// Resolution-dependent mesh data shared by every frame.
struct LodGeometry {
  UVBinding binding;
  UVPositionMap rest;
  DecodeParams params;
};

/// Feature field, mapping network, attribute heads and the bound mesh.
template <class T>
class AvatarModel {
 public:
  ModelConfig config;
  Mesh mesh;
  FeatureField<T> field;
  Mlp<T> mapper;
  std::array<Mlp<T>, kHeadCount> heads;

  AvatarModel() = default;
  static AvatarModel create(const ModelConfig& cfg, Mesh mesh);

  /// Checks that every component agrees with `config`. Throws ConfigError.
  void check_consistency() const;

  PositionNormalizer normalizer() const { return PositionNormalizer::bounding_sphere(mesh.vertices); }
  /// Cached per resolution.
  const LodGeometry& geometry(int resolution) const;
  std::size_t gaussian_count_at(double lod) const { return lodhead::gaussian_count(geometry(field.resolution_for(lod)).rest); }

  std::size_t parameter_count() const;

 private:
  mutable std::map<int, std::shared_ptr<const LodGeometry>> geometry_cache_;
};

/// Gradients for every trainable block of an AvatarModel.
template <class T>
struct ModelGradients {
  std::vector<FeatureMap<T>> field;
  MlpGradients<T> mapper;
  std::array<MlpGradients<T>, kHeadCount> heads;

  static ModelGradients zeros_like(const AvatarModel<T>& model);
  void zero();
  void add(const ModelGradients& other);
  std::vector<std::span<const T>> field_blocks() const;
  std::vector<std::span<const T>> network_blocks(bool include_mapper) const;
};

template <class T>
std::vector<std::span<T>> field_parameter_blocks(AvatarModel<T>& model);
template <class T>
std::vector<std::span<T>> network_parameter_blocks(AvatarModel<T>& model, bool include_mapper);

/// FNV-1a over the raw bytes of the mapper parameters.
template <class T>
std::uint64_t mapper_hash(const AvatarModel<T>& model);

extern template class AvatarModel<float>;
extern template class AvatarModel<double>;
extern template struct ModelGradients<float>;
extern template struct ModelGradients<double>;

}  // namespace lodhead

// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace lodhead {

/// Square latent map, texel (x, y) stored row-major as data[(y * S + x) * C + c].
/// Texel x samples u = (x + 0.5) / S, row y samples v = (y + 0.5) / S.
template <class T>
struct FeatureMap {
  int resolution = 0;
  int channels = 0;
  std::vector<T> data;

  FeatureMap() = default;
  FeatureMap(int res, int ch, T fill = T(0));

  std::size_t texel_count() const { return static_cast<std::size_t>(resolution) * resolution; }
  T* texel(int x, int y) { return data.data() + (static_cast<std::size_t>(y) * resolution + x) * channels; }
  const T* texel(int x, int y) const {
    return data.data() + (static_cast<std::size_t>(y) * resolution + x) * channels;
  }
  bool same_shape(const FeatureMap& other) const {
    return resolution == other.resolution && channels == other.channels;
  }
};

/// Texel side length for a continuous LOD value: s_max - l (s_max - s_min),
/// rounded to nearest with halves going toward s_max.
int resolution_for_lod(double lod, int s_max, int s_min);

/// Softmax over -|ln S_i - ln S| / tau. Strictly positive, sums to one.
std::vector<double> blend_weights(std::span<const int> resolutions, int target, double tau);

/// Separable Catmull-Rom (a = -0.5) resize with clamped taps.
template <class T>
FeatureMap<T> bicubic_resize(const FeatureMap<T>& map, int target);

/// Exact transpose of bicubic_resize: maps a gradient on the target grid back
/// onto a source grid of side `source_resolution`.
template <class T>
FeatureMap<T> bicubic_resize_adjoint(const FeatureMap<T>& grad, int source_resolution);

/// Resolutions spaced geometrically between s_min and s_max (inclusive).
std::vector<int> geometric_levels(int s_min, int s_max, int count);

/// Multi-level learnable UV feature pyramid.
template <class T>
class FeatureField {
 public:
  FeatureField() = default;
  /// Levels must be strictly increasing, share one channel count, and span
  /// exactly [s_min, s_max].
  FeatureField(std::vector<FeatureMap<T>> levels, double tau, int s_min, int s_max);

  /// Levels at the given resolutions, features i.i.d. uniform in [-1e-2, 1e-2].
  static FeatureField random(std::span<const int> resolutions, int channels, double tau,
                             std::uint64_t seed);

  const std::vector<FeatureMap<T>>& levels() const { return levels_; }
  std::vector<FeatureMap<T>>& levels() { return levels_; }
  std::vector<int> resolutions() const;
  double tau() const { return tau_; }
  int s_min() const { return s_min_; }
  int s_max() const { return s_max_; }
  int channels() const { return levels_.empty() ? 0 : levels_.front().channels; }

  int resolution_for(double lod) const { return resolution_for_lod(lod, s_max_, s_min_); }
  std::vector<double> weights_for(double lod) const;

  /// Weighted blend of every level resized to resolution_for(lod).
  FeatureMap<T> resample(double lod) const;

  /// d loss / d level_i for a gradient on the resampled map. The LOD itself
  /// is an input and receives no gradient.
  std::vector<FeatureMap<T>> resample_backward(double lod, const FeatureMap<T>& grad_out) const;

 private:
  std::vector<FeatureMap<T>> levels_;
  double tau_ = 0.35;
  int s_min_ = 0;
  int s_max_ = 0;
};

extern template struct FeatureMap<float>;
extern template struct FeatureMap<double>;
extern template class FeatureField<float>;
extern template class FeatureField<double>;

}  // namespace lodhead

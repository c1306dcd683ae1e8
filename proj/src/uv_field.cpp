// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#include "lodhead/uv_field.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lodhead/rng.hpp"
#include "lodhead/simd/kernels.hpp"

namespace lodhead {

template <class T>
FeatureMap<T>::FeatureMap(int res, int ch, T fill) : resolution(res), channels(ch) {
  if (res < 1 || ch < 1) throw std::invalid_argument("feature map needs resolution >= 1 and channels >= 1");
  data.assign(static_cast<std::size_t>(res) * res * ch, fill);
}

int resolution_for_lod(double lod, int s_max, int s_min) {
  if (!(lod >= 0.0 && lod <= 1.0)) throw std::invalid_argument("LOD must lie in [0, 1], got " + std::to_string(lod));
  if (s_min < 1 || s_max < 1) throw std::invalid_argument("resolutions must be positive");
  if (s_min > s_max)
    throw std::invalid_argument("s_min (" + std::to_string(s_min) + ") exceeds s_max (" + std::to_string(s_max) + ")");
  const double s = static_cast<double>(s_max) - lod * static_cast<double>(s_max - s_min);
  const int rounded = static_cast<int>(std::floor(s + 0.5));
  return std::clamp(rounded, s_min, s_max);
}

std::vector<double> blend_weights(std::span<const int> resolutions, int target, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("blend temperature must be positive");
  if (target < 1) throw std::invalid_argument("target resolution must be positive");
  if (resolutions.empty()) throw std::invalid_argument("no resolutions to blend");
  // |ln a - ln b| evaluated as ln(max/min): mirrored ratios then produce
  // bitwise-identical distances, so ties get exactly equal weights.
  std::vector<double> dist(resolutions.size());
  for (std::size_t i = 0; i < resolutions.size(); ++i) {
    const int s = resolutions[i];
    if (s < 1) throw std::invalid_argument("level resolutions must be positive");
    const double hi = std::max(s, target), lo = std::min(s, target);
    dist[i] = std::log(hi / lo);
  }
  const double nearest = *std::min_element(dist.begin(), dist.end());
  std::vector<double> w(dist.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(-(dist[i] - nearest) / tau);
    sum += w[i];
  }
  for (double& x : w) x /= sum;
  return w;
}

namespace {

struct Taps {
  std::array<int, 4> index;
  std::array<double, 4> weight;
};

std::array<double, 4> catmull_rom(double t) {
  const double t2 = t * t, t3 = t2 * t;
  return {-0.5 * t3 + t2 - 0.5 * t, 1.5 * t3 - 2.5 * t2 + 1.0, -1.5 * t3 + 2.0 * t2 + 0.5 * t,
          0.5 * t3 - 0.5 * t2};
}

std::vector<Taps> tap_table(int source, int target) {
  std::vector<Taps> taps(static_cast<std::size_t>(target));
  const double scale = static_cast<double>(source) / static_cast<double>(target);
  for (int o = 0; o < target; ++o) {
    const double p = (o + 0.5) * scale - 0.5;
    const double base = std::floor(p);
    const auto w = catmull_rom(p - base);
    Taps& tp = taps[static_cast<std::size_t>(o)];
    for (int k = 0; k < 4; ++k) {
      tp.index[k] = std::clamp(static_cast<int>(base) - 1 + k, 0, source - 1);
      tp.weight[k] = w[k];
    }
  }
  return taps;
}

}  // namespace

template <class T>
FeatureMap<T> bicubic_resize(const FeatureMap<T>& map, int target) {
  if (target < 1) throw std::invalid_argument("resize target must be positive");
  if (target == map.resolution) return map;
  const int src = map.resolution, ch = map.channels;
  const auto taps = tap_table(src, target);
  const std::size_t row_out = static_cast<std::size_t>(target) * ch;

  // Horizontal pass: src rows x target columns.
  std::vector<T> tmp(static_cast<std::size_t>(src) * row_out, T(0));
  for (int y = 0; y < src; ++y) {
    for (int x = 0; x < target; ++x) {
      T* dst = tmp.data() + static_cast<std::size_t>(y) * row_out + static_cast<std::size_t>(x) * ch;
      const Taps& tp = taps[static_cast<std::size_t>(x)];
      for (int k = 0; k < 4; ++k) simd::axpy<T>(ch, static_cast<T>(tp.weight[k]), map.texel(tp.index[k], y), dst);
    }
  }
  // Vertical pass: whole rows at a time.
  FeatureMap<T> out(target, ch);
  for (int y = 0; y < target; ++y) {
    T* dst = out.data.data() + static_cast<std::size_t>(y) * row_out;
    const Taps& tp = taps[static_cast<std::size_t>(y)];
    for (int k = 0; k < 4; ++k)
      simd::axpy<T>(row_out, static_cast<T>(tp.weight[k]), tmp.data() + static_cast<std::size_t>(tp.index[k]) * row_out, dst);
  }
  return out;
}

template <class T>
FeatureMap<T> bicubic_resize_adjoint(const FeatureMap<T>& grad, int source_resolution) {
  if (source_resolution < 1) throw std::invalid_argument("adjoint source resolution must be positive");
  if (source_resolution == grad.resolution) return grad;
  const int src = source_resolution, target = grad.resolution, ch = grad.channels;
  const auto taps = tap_table(src, target);
  const std::size_t row_out = static_cast<std::size_t>(target) * ch;

  std::vector<T> tmp(static_cast<std::size_t>(src) * row_out, T(0));
  for (int y = 0; y < target; ++y) {
    const T* g = grad.data.data() + static_cast<std::size_t>(y) * row_out;
    const Taps& tp = taps[static_cast<std::size_t>(y)];
    for (int k = 0; k < 4; ++k)
      simd::axpy<T>(row_out, static_cast<T>(tp.weight[k]), g, tmp.data() + static_cast<std::size_t>(tp.index[k]) * row_out);
  }
  FeatureMap<T> out(src, ch);
  for (int y = 0; y < src; ++y) {
    for (int x = 0; x < target; ++x) {
      const T* g = tmp.data() + static_cast<std::size_t>(y) * row_out + static_cast<std::size_t>(x) * ch;
      const Taps& tp = taps[static_cast<std::size_t>(x)];
      for (int k = 0; k < 4; ++k) simd::axpy<T>(ch, static_cast<T>(tp.weight[k]), g, out.texel(tp.index[k], y));
    }
  }
  return out;
}

std::vector<int> geometric_levels(int s_min, int s_max, int count) {
  if (count < 2) throw std::invalid_argument("a feature field needs at least two levels");
  if (s_min < 1 || s_min >= s_max) throw std::invalid_argument("geometric levels need 1 <= s_min < s_max");
  std::vector<int> out(static_cast<std::size_t>(count));
  const double ratio = static_cast<double>(s_max) / s_min;
  for (int i = 0; i < count; ++i)
    out[static_cast<std::size_t>(i)] =
        static_cast<int>(std::lround(s_min * std::pow(ratio, static_cast<double>(i) / (count - 1))));
  out.front() = s_min;
  out.back() = s_max;
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i] <= out[i - 1]) throw std::invalid_argument("too many levels for the resolution range");
  return out;
}

template <class T>
FeatureField<T>::FeatureField(std::vector<FeatureMap<T>> levels, double tau, int s_min, int s_max)
    : levels_(std::move(levels)), tau_(tau), s_min_(s_min), s_max_(s_max) {
  if (levels_.size() < 2) throw std::invalid_argument("a feature field needs at least two levels");
  if (!(tau_ > 0.0)) throw std::invalid_argument("blend temperature must be positive");
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (levels_[i].channels != levels_.front().channels)
      throw std::invalid_argument("feature levels disagree on channel count");
    if (i > 0 && levels_[i].resolution <= levels_[i - 1].resolution)
      throw std::invalid_argument("feature level resolutions must be strictly increasing");
  }
  if (levels_.front().resolution != s_min_ || levels_.back().resolution != s_max_)
    throw std::invalid_argument("feature field must contain levels at exactly s_min and s_max");
}

template <class T>
FeatureField<T> FeatureField<T>::random(std::span<const int> resolutions, int channels, double tau,
                                        std::uint64_t seed) {
  Rng rng(seed);
  std::vector<FeatureMap<T>> levels;
  for (int s : resolutions) {
    FeatureMap<T> m(s, channels);
    for (T& v : m.data) v = static_cast<T>(rng.uniform(-1e-2, 1e-2));
    levels.push_back(std::move(m));
  }
  if (resolutions.empty()) throw std::invalid_argument("no level resolutions");
  return FeatureField(std::move(levels), tau, resolutions.front(), resolutions.back());
}

template <class T>
std::vector<int> FeatureField<T>::resolutions() const {
  std::vector<int> r;
  for (const auto& l : levels_) r.push_back(l.resolution);
  return r;
}

template <class T>
std::vector<double> FeatureField<T>::weights_for(double lod) const {
  const auto res = resolutions();
  return blend_weights(res, resolution_for(lod), tau_);
}

template <class T>
FeatureMap<T> FeatureField<T>::resample(double lod) const {
  const int s = resolution_for(lod);
  const auto w = weights_for(lod);
  FeatureMap<T> out(s, channels());
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (levels_[i].resolution == s) {
      simd::axpy<T>(out.data.size(), static_cast<T>(w[i]), levels_[i].data.data(), out.data.data());
    } else {
      const FeatureMap<T> r = bicubic_resize(levels_[i], s);
      simd::axpy<T>(out.data.size(), static_cast<T>(w[i]), r.data.data(), out.data.data());
    }
  }
  return out;
}

template <class T>
std::vector<FeatureMap<T>> FeatureField<T>::resample_backward(double lod, const FeatureMap<T>& grad_out) const {
  const int s = resolution_for(lod);
  if (grad_out.resolution != s || grad_out.channels != channels())
    throw std::invalid_argument("gradient shape does not match the resampled map for this LOD");
  const auto w = weights_for(lod);
  std::vector<FeatureMap<T>> grads;
  grads.reserve(levels_.size());
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    FeatureMap<T> g = bicubic_resize_adjoint(grad_out, levels_[i].resolution);
    for (T& v : g.data) v *= static_cast<T>(w[i]);
    grads.push_back(std::move(g));
  }
  return grads;
}

template struct FeatureMap<float>;
template struct FeatureMap<double>;
template class FeatureField<float>;
template class FeatureField<double>;
template FeatureMap<float> bicubic_resize(const FeatureMap<float>&, int);
template FeatureMap<double> bicubic_resize(const FeatureMap<double>&, int);
template FeatureMap<float> bicubic_resize_adjoint(const FeatureMap<float>&, int);
template FeatureMap<double> bicubic_resize_adjoint(const FeatureMap<double>&, int);

}  // namespace lodhead

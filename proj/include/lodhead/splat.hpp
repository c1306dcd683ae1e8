// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "lodhead/geometry.hpp"
#include "lodhead/image.hpp"
#include "lodhead/sh.hpp"

namespace lodhead {

/// Flat per-Gaussian attribute arrays. Quaternions are (w, x, y, z); SH
/// coefficients are basis-major, sh[i * stride + 3k + channel]. Gradients use
/// the same layout.
template <class T>
struct GaussianSet {
  int sh_degree = kMaxShDegree;
  std::vector<T> means;      // 3n
  std::vector<T> scales;     // 3n
  std::vector<T> rotations;  // 4n
  std::vector<T> opacities;  // n
  std::vector<T> sh;         // stride * n

  std::size_t size() const { return opacities.size(); }
  int sh_stride() const { return sh_coeff_count(sh_degree); }
  void resize(std::size_t n);  // zero-filled

  /// Unit quaternions within 1e-6, positive scales, opacity in (0, 1),
  /// finite values. Throws std::invalid_argument.
  void check_invariants() const;
};

struct RenderSettings {
  std::array<double, 3> background{1.0, 1.0, 1.0};
  int tile_size = 16;
  double dilation = 0.3;        // px^2 added to the projected covariance
  double near_plane = 0.01;
  double guard_band = 0.3;      // cull means beyond this fraction outside the image
  double alpha_cutoff = 1.0 / 255.0;
  double max_alpha = 0.99;      // per-pixel alpha saturation
  double min_transmittance = 1e-4;
};

template <class T>
using Mat3T = Eigen::Matrix<T, 3, 3>;
template <class T>
using Vec3T = Eigen::Matrix<T, 3, 1>;
template <class T>
using Mat2T = Eigen::Matrix<T, 2, 2>;

/// R S S^T R^T from scales and a unit quaternion (|q| = 1 within 1e-6).
template <class T>
Mat3T<T> covariance_from_sq(const std::array<T, 3>& s, const std::array<T, 4>& q);

/// exp(-0.5 (x - mu)^T Sigma^-1 (x - mu)); throws for singular Sigma
/// (condition number >= 1e12).
template <class T>
T evaluate_gaussian(const Vec3T<T>& x, const Vec3T<T>& mu, const Mat3T<T>& sigma);

/// One Gaussian after projection to the image plane.
template <class T>
struct SplatPrimitive {
  std::uint32_t id = 0;
  T mean[2]{};
  Mat2T<T> cov;    // dilated
  Mat2T<T> conic;  // cov^-1
  T depth{};
  T opacity{};
  T color[3]{};
  bool clamped[3]{};
  T radius{};      // pixel radius beyond which alpha < cutoff
};

template <class T>
std::optional<SplatPrimitive<T>> project(const GaussianSet<T>& set, std::size_t index, const Camera& cam,
                                         const RenderSettings& settings = {});

/// Image plus everything the backward pass replays.
template <class T>
struct RenderResult {
  Image<T> image;                       // unclamped
  std::vector<T> alpha;                 // accumulated opacity per pixel
  std::vector<SplatPrimitive<T>> prims;  // visible, sorted front to back
  int tile_size = 0;
  int tiles_x = 0;
  int tiles_y = 0;
  std::vector<std::vector<std::uint32_t>> tiles;  // indices into prims, in depth order
  std::vector<T> final_transmittance;
  std::vector<std::uint32_t> n_contrib;  // entries of the tile list walked per pixel
};

/// Tiled front-to-back compositing over a global depth sort (ties by index).
template <class T>
RenderResult<T> render(const GaussianSet<T>& set, const Camera& cam, const RenderSettings& settings = {});

/// Oracle: every pixel walks every visible primitive; no tile binning.
template <class T>
RenderResult<T> render_reference(const GaussianSet<T>& set, const Camera& cam,
                                 const RenderSettings& settings = {});

/// Reverse-mode gradients for all attributes given d loss / d image. The
/// depth order is treated as constant.
template <class T>
GaussianSet<T> render_backward(const GaussianSet<T>& set, const Camera& cam, const RenderSettings& settings,
                               const RenderResult<T>& forward, const Image<T>& grad_image);

template <class T>
GaussianSet<T> render_backward(const GaussianSet<T>& set, const Camera& cam, const RenderSettings& settings,
                               const Image<T>& grad_image);

}  // namespace lodhead

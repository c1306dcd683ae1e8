// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lodhead/uv_field.hpp"

namespace lodhead {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Blendshape coefficients (expression, jaw and eye dims flattened).
using ExpressionVector = std::vector<double>;
inline constexpr int kDefaultExpressionDim = 109;

/// UV-mapped triangle mesh with linear blendshapes. Vertices on a UV seam are
/// duplicated so every vertex has exactly one UV.
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> faces;
  std::vector<Vec2> uvs;
  std::vector<std::vector<Vec3>> blendshapes;

  /// Index ranges, UV range, UV triangle area > 1e-12 and UV non-overlap.
  /// Throws std::invalid_argument naming the offending face.
  void validate() const;
};

/// rest + sum_k expr_k * blendshape_k over the first min(E, #blendshapes) coefficients.
std::vector<Vec3> deform(const Mesh& mesh, const ExpressionVector& expr);

/// Per-texel triangle and barycentric weights at one resolution. Depends only
/// on the UV layout, so it is shared by every expression.
struct UVBinding {
  int resolution = 0;
  std::vector<std::int32_t> face;                    // -1 where uncovered
  std::vector<std::array<std::uint32_t, 3>> corners;  // vertex ids of that face
  std::vector<std::array<double, 3>> bary;
};

UVBinding bind_uv(const Mesh& mesh, int resolution);

struct UVPositionMap {
  int resolution = 0;
  std::vector<Vec3> positions;       // exactly zero where mask is false
  std::vector<std::uint8_t> mask;

  std::size_t texel_count() const { return mask.size(); }
};

UVPositionMap apply_binding(const UVBinding& binding, const std::vector<Vec3>& vertices);

/// Barycentric interpolation of deformed vertices at covered texel centres.
UVPositionMap rasterize_uv(const Mesh& mesh, const std::vector<Vec3>& deformed, int resolution);

/// Number of covered texels = number of Gaussians at this resolution.
std::size_t gaussian_count(const UVPositionMap& pmap);

/// Mean 3D distance between horizontally or vertically adjacent covered texels.
double mean_texel_spacing(const UVPositionMap& pmap);

/// Centre/scale applied to positions before encoding.
struct PositionNormalizer {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;

  static PositionNormalizer bounding_sphere(const std::vector<Vec3>& vertices);
  Vec3 apply(const Vec3& p) const { return (p - center) / radius; }
};

inline constexpr int encoded_channels(int n_freq) { return 3 + 6 * n_freq; }

/// [p, sin(2^k p_d), cos(2^k p_d) for d = x,y,z; k = 0..n_freq-1] per texel on
/// normalized positions; uncovered texels encode the zero vector.
template <class T>
FeatureMap<T> positional_encode(const UVPositionMap& pmap, int n_freq,
                                const PositionNormalizer& norm = {});

/// Pinhole camera, OpenCV axes (x right, y down, z forward). Pixel (x, y)
/// has its centre at (x + 0.5, y + 0.5).
struct Camera {
  double fx = 1.0, fy = 1.0, cx = 0.0, cy = 0.0;
  int width = 1, height = 1;
  Mat3 rotation = Mat3::Identity();  // world -> camera
  Vec3 translation = Vec3::Zero();

  Vec3 position() const { return -rotation.transpose() * translation; }
  Vec3 to_camera(const Vec3& p) const { return rotation * p + translation; }
  void validate() const;

  /// Camera at `eye` looking at `target`, world +y up, horizontal field of view in radians.
  static Camera look_at(const Vec3& eye, const Vec3& target, double fov_x, int width, int height);
};

/// Orbit about `center`: yaw about world +y, pitch about the base camera's
/// right axis. Distance to the centre is preserved.
Camera orbit_camera(const Camera& base, double yaw, double pitch, const Vec3& center);

struct DeskHeadOptions {
  int n_lon = 48;
  int n_lat = 24;
  Vec3 radii{0.085, 0.105, 0.095};  // metres
  double neck_latitude = -1.15;  // radians; lowest ring of the head
  double uv_margin = 0.03;
  int n_blendshapes = 8;
  double blend_amplitude = 0.008;
};

/// Procedural ellipsoidal "head": lat-long UV chart, face toward +z, seam at
/// the back, raised-cosine bump blendshapes on the front hemisphere.
Mesh make_desk_head(const DeskHeadOptions& opts = {});

/// Axis-aligned bounding-box centre of a vertex set.
Vec3 bounding_box_center(const std::vector<Vec3>& vertices);

// Text mesh (OBJ subset: v, vt, f with v/vt indices) plus an optional
// blendshape sidecar: u32 count, then count * n_positions * 3 float32
// little-endian offsets in OBJ position order. Vertices are split per unique
// (position, uv) pair on load.
Mesh load_mesh(const std::filesystem::path& obj_path,
               const std::filesystem::path& blendshape_path = {});
void save_mesh(const Mesh& mesh, const std::filesystem::path& obj_path,
               const std::filesystem::path& blendshape_path);

}  // namespace lodhead

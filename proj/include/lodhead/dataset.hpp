// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "lodhead/geometry.hpp"
#include "lodhead/image.hpp"
#include "lodhead/splat.hpp"

namespace lodhead {

/// One supervised frame: target image, detail-region mask, expression and camera.
struct FrameSample {
  Image<float> image;
  PixelMask part_mask;
  ExpressionVector expr;
  Camera camera;

  void validate() const;  // throws DataError
};

struct Dataset {
  Mesh mesh;
  std::vector<FrameSample> frames;
};

struct SyntheticOptions {
  std::uint64_t seed = 7;
  int n_frames = 8;
  int image_size = 64;
  int resolution = 64;  // texels per side of the ground-truth Gaussian layout
  int expr_dim = kDefaultExpressionDim;
  DeskHeadOptions head;
  double fov_x = 0.8;           // radians
  double distance = 0.36;       // camera distance from the head centre (metres)
  double yaw_range = 0.45;      // orbit offsets are drawn within +-range (radians)
  double pitch_range = 0.15;
  double scale_factor = 0.75;   // ground-truth scale relative to texel spacing
  double opacity = 0.9;
  double expr_amplitude = 1.0;  // |expr_k| never exceeds min(1, amplitude)

  void validate() const;  // throws ConfigError
};

/// Smooth albedo over the head's (longitude, latitude) chart, in [0, 1].
std::array<double, 3> procedural_albedo(double longitude, double latitude);

/// Detail region (mouth and eyes) on the same chart.
bool in_part_region(double longitude, double latitude);

/// Ground-truth Gaussians for one expression: one per covered texel at
/// `opts.resolution`, isotropic scales, identity rotation, DC-only colour.
/// With `part_indicator`, colours become 1 inside the detail region and 0
/// elsewhere.
GaussianSet<double> ground_truth_gaussians(const Mesh& mesh, const ExpressionVector& expr,
                                           const SyntheticOptions& opts, bool part_indicator = false);

/// Camera used by frame `index` (the base camera is index-independent).
Camera synthetic_base_camera(const Mesh& mesh, const SyntheticOptions& opts);

/// Procedural desk-head dataset whose targets are exactly representable.
Dataset generate_synthetic_dataset(const SyntheticOptions& opts);

/// Directory layout: manifest.txt, mesh.obj, mesh.blend, and per frame
/// <name>.png, <name>_mask.png, <name>.bin.
void save_dataset(const Dataset& data, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

/// Sidecar: u32 expr_dim, expr_dim float32, u32 width, u32 height,
/// f64 fx fy cx cy, f64 rotation (row-major 3x3), f64 translation.
void write_frame_sidecar(const std::filesystem::path& path, const ExpressionVector& expr, const Camera& cam);
void read_frame_sidecar(const std::filesystem::path& path, ExpressionVector& expr, Camera& cam);

}  // namespace lodhead

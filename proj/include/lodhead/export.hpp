// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "lodhead/splat.hpp"

namespace lodhead {

/// Binary little-endian PLY, one vertex per Gaussian with float properties
/// in this order: x y z, scale_0..2 (linear, not log), rot_0..3 (w x y z),
/// opacity (in (0,1), not a logit), sh_0..sh_{3K-1} basis-major
/// (sh_{3k+c} is basis k of channel c).
void write_gaussians_ply(const std::filesystem::path& path, const GaussianSet<float>& set);

/// Reads files written by write_gaussians_ply.
GaussianSet<float> read_gaussians_ply(const std::filesystem::path& path);

}  // namespace lodhead

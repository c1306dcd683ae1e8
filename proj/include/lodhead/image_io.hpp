// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "lodhead/image.hpp"

namespace lodhead {

/// 8-bit RGB PNG. Values are clamped to [0, 1] and rounded; no gamma curve.
void write_png(const std::filesystem::path& path, const Image<float>& image);
Image<float> read_png(const std::filesystem::path& path);

/// 8-bit grayscale PNG, 255 where set.
void write_mask_png(const std::filesystem::path& path, const PixelMask& mask);
PixelMask read_mask_png(const std::filesystem::path& path);

/// Side-by-side concatenation; all images must share a height.
Image<float> hstack(const std::vector<Image<float>>& images);

}  // namespace lodhead

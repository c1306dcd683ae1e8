// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace lodhead {

/// Interleaved RGB image, row 0 at the top.
template <class T>
struct Image {
  int width = 0;
  int height = 0;
  std::vector<T> data;  // height x width x 3

  Image() = default;
  Image(int w, int h, T fill = T(0)) : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, fill) {}

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  T* pixel(int x, int y) { return data.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
  const T* pixel(int x, int y) const { return data.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
  bool same_shape(const Image& o) const { return width == o.width && height == o.height; }

  Image clamped() const {
    Image out = *this;
    for (T& v : out.data) v = std::clamp(v, T(0), T(1));
    return out;
  }

  template <class U>
  Image<U> cast() const {
    Image<U> out(width, height);
    for (std::size_t i = 0; i < data.size(); ++i) out.data[i] = static_cast<U>(data[i]);
    return out;
  }
};

/// Binary per-pixel mask aligned with an Image.
struct PixelMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  PixelMask() = default;
  PixelMask(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0) {}
  bool at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x] != 0; }
};

}  // namespace lodhead

// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#include "lodhead/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

#include "lodhead/errors.hpp"

namespace lodhead {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_rows(const std::filesystem::path& path, int width, int height, int color_type,
                const std::vector<unsigned char>& pixels, int channels) {
  FilePtr fp(std::fopen(path.string().c_str(), "wb"));
  if (!fp) throw DataError("cannot open " + path.string() + " for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw DataError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw DataError("failed to encode " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y)
    png_write_row(png, const_cast<png_bytep>(pixels.data() + static_cast<std::size_t>(y) * width * channels));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// Decodes to 8-bit RGB or gray depending on `want_gray`.
std::vector<unsigned char> read_rows(const std::filesystem::path& path, bool want_gray, int& width, int& height) {
  FilePtr fp(std::fopen(path.string().c_str(), "rb"));
  if (!fp) throw DataError("cannot open " + path.string());
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8)) throw DataError(path.string() + " is not a PNG file");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("libpng initialisation failed");
  }
  std::vector<unsigned char> pixels;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("failed to decode " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  width = static_cast<int>(png_get_image_width(png, info));
  height = static_cast<int>(png_get_image_height(png, info));
  const int color = png_get_color_type(png, info);
  if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  const bool is_gray = !(color & PNG_COLOR_MASK_COLOR) && color != PNG_COLOR_TYPE_PALETTE;
  if (want_gray && !is_gray) png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  if (!want_gray && is_gray) png_set_gray_to_rgb(png);
  png_read_update_info(png, info);
  const int channels = want_gray ? 1 : 3;
  if (static_cast<int>(png_get_rowbytes(png, info)) != width * channels) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("unsupported PNG layout in " + path.string());
  }
  pixels.resize(static_cast<std::size_t>(width) * height * channels);
  for (int y = 0; y < height; ++y) png_read_row(png, pixels.data() + static_cast<std::size_t>(y) * width * channels, nullptr);
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return pixels;
}

}  // namespace

void write_png(const std::filesystem::path& path, const Image<float>& image) {
  std::vector<unsigned char> px(image.data.size());
  for (std::size_t i = 0; i < px.size(); ++i)
    px[i] = static_cast<unsigned char>(std::lround(std::clamp(image.data[i], 0.0f, 1.0f) * 255.0f));
  write_rows(path, image.width, image.height, PNG_COLOR_TYPE_RGB, px, 3);
}

Image<float> read_png(const std::filesystem::path& path) {
  int w = 0, h = 0;
  const auto px = read_rows(path, false, w, h);
  Image<float> img(w, h);
  for (std::size_t i = 0; i < px.size(); ++i) img.data[i] = static_cast<float>(px[i]) / 255.0f;
  return img;
}

void write_mask_png(const std::filesystem::path& path, const PixelMask& mask) {
  std::vector<unsigned char> px(mask.data.size());
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = mask.data[i] ? 255 : 0;
  write_rows(path, mask.width, mask.height, PNG_COLOR_TYPE_GRAY, px, 1);
}

PixelMask read_mask_png(const std::filesystem::path& path) {
  int w = 0, h = 0;
  const auto px = read_rows(path, true, w, h);
  PixelMask m(w, h);
  for (std::size_t i = 0; i < px.size(); ++i) m.data[i] = px[i] >= 128 ? 1 : 0;
  return m;
}

Image<float> hstack(const std::vector<Image<float>>& images) {
  if (images.empty()) return {};
  int total = 0;
  for (const auto& im : images) {
    if (im.height != images.front().height) throw std::invalid_argument("hstack needs images of equal height");
    total += im.width;
  }
  Image<float> out(total, images.front().height);
  int x0 = 0;
  for (const auto& im : images) {
    for (int y = 0; y < im.height; ++y)
      std::copy_n(im.pixel(0, y), 3 * im.width, out.pixel(x0, y));
    x0 += im.width;
  }
  return out;
}

}  // namespace lodhead

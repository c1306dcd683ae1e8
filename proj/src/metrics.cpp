// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#include "lodhead/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace lodhead {
namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;

template <class T>
void require_same(const Image<T>& a, const Image<T>& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("metric inputs have different shapes");
  if (a.data.empty()) throw std::invalid_argument("metric inputs are empty");
}

std::array<double, kWindow> gaussian_window() {
  std::array<double, kWindow> w{};
  double sum = 0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kWindow / 2;
    w[i] = std::exp(-d * d / (2 * kSigma * kSigma));
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

// Valid-mode separable filtering of one channel.
std::vector<double> filter(const std::vector<double>& src, int width, int height) {
  static const auto w = gaussian_window();
  const int ow = width - kWindow + 1, oh = height - kWindow + 1;
  std::vector<double> rows(static_cast<std::size_t>(ow) * height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < ow; ++x) {
      double s = 0;
      for (int k = 0; k < kWindow; ++k) s += w[k] * src[static_cast<std::size_t>(y) * width + x + k];
      rows[static_cast<std::size_t>(y) * ow + x] = s;
    }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double s = 0;
      for (int k = 0; k < kWindow; ++k) s += w[k] * rows[static_cast<std::size_t>(y + k) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  return out;
}

}  // namespace

template <class T>
double psnr(const Image<T>& a, const Image<T>& b) {
  require_same(a, b);
  double se = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
    se += d * d;
  }
  const double mse = se / static_cast<double>(a.data.size());
  if (mse < 1e-10) return kPsnrCap;
  return std::min(kPsnrCap, -10.0 * std::log10(mse));
}

template <class T>
double ssim(const Image<T>& a, const Image<T>& b) {
  require_same(a, b);
  if (a.width < kWindow || a.height < kWindow) throw std::invalid_argument("ssim needs images of at least 11x11");
  constexpr double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  const std::size_t n = a.pixel_count();
  double total = 0;
  for (int c = 0; c < 3; ++c) {
    std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
    for (std::size_t p = 0; p < n; ++p) {
      x[p] = static_cast<double>(a.data[3 * p + c]);
      y[p] = static_cast<double>(b.data[3 * p + c]);
      xx[p] = x[p] * x[p];
      yy[p] = y[p] * y[p];
      xy[p] = x[p] * y[p];
    }
    const auto mx = filter(x, a.width, a.height), my = filter(y, a.width, a.height);
    const auto sxx = filter(xx, a.width, a.height), syy = filter(yy, a.width, a.height);
    const auto sxy = filter(xy, a.width, a.height);
    double sum = 0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
      const double vx = sxx[i] - mx[i] * mx[i], vy = syy[i] - my[i] * my[i], cov = sxy[i] - mx[i] * my[i];
      sum += ((2 * mx[i] * my[i] + c1) * (2 * cov + c2)) /
             ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
    }
    total += sum / static_cast<double>(mx.size());
  }
  return total / 3.0;
}

template <class T>
double l1(const Image<T>& a, const Image<T>& b) {
  require_same(a, b);
  double s = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    s += std::abs(static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]));
  return s / static_cast<double>(a.data.size());
}

template double psnr<float>(const Image<float>&, const Image<float>&);
template double psnr<double>(const Image<double>&, const Image<double>&);
template double ssim<float>(const Image<float>&, const Image<float>&);
template double ssim<double>(const Image<double>&, const Image<double>&);
template double l1<float>(const Image<float>&, const Image<float>&);
template double l1<double>(const Image<double>&, const Image<double>&);

}  // namespace lodhead

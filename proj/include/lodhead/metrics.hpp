// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "lodhead/image.hpp"

namespace lodhead {

inline constexpr double kPsnrCap = 100.0;

/// -10 log10(MSE), capped at kPsnrCap when MSE < 1e-10.
template <class T>
double psnr(const Image<T>& a, const Image<T>& b);

/// Mean SSIM over RGB channels: 11x11 Gaussian window (sigma 1.5),
/// K1 = 0.01, K2 = 0.03, dynamic range 1, valid window positions only.
template <class T>
double ssim(const Image<T>& a, const Image<T>& b);

template <class T>
double l1(const Image<T>& a, const Image<T>& b);

}  // namespace lodhead

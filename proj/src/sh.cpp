// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#include "lodhead/sh.hpp"

#include <cmath>
#include <stdexcept>

namespace lodhead {
namespace {

constexpr double kC0 = 0.28209479177387814;
constexpr double kC1 = 0.4886025119029199;
constexpr double kC2[5] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005, -1.0925484305920792,
                           0.5462742152960396};
constexpr double kC3[7] = {-0.5900435899266435, 2.890611442640554, -0.4570457994644658, 0.3731763325901154,
                           -0.4570457994644658, 1.445305721320277, -0.5900435899266435};

}  // namespace

template <class T>
void sh_basis(int degree, const T dir[3], T* b, T* g) {
  if (degree < 0 || degree > kMaxShDegree) throw std::invalid_argument("SH degree must be in [0, 3]");
  const T x = dir[0], y = dir[1], z = dir[2];
  auto set_grad = [g](int k, T gx, T gy, T gz) {
    if (!g) return;
    g[3 * k] = gx;
    g[3 * k + 1] = gy;
    g[3 * k + 2] = gz;
  };
  b[0] = T(kC0);
  set_grad(0, T(0), T(0), T(0));
  if (degree < 1) return;
  const T c1 = T(kC1);
  b[1] = -c1 * y;
  b[2] = c1 * z;
  b[3] = -c1 * x;
  set_grad(1, T(0), -c1, T(0));
  set_grad(2, T(0), T(0), c1);
  set_grad(3, -c1, T(0), T(0));
  if (degree < 2) return;
  const T xx = x * x, yy = y * y, zz = z * z;
  const T c20 = T(kC2[0]), c21 = T(kC2[1]), c22 = T(kC2[2]), c23 = T(kC2[3]), c24 = T(kC2[4]);
  b[4] = c20 * x * y;
  b[5] = c21 * y * z;
  b[6] = c22 * (T(2) * zz - xx - yy);
  b[7] = c23 * x * z;
  b[8] = c24 * (xx - yy);
  set_grad(4, c20 * y, c20 * x, T(0));
  set_grad(5, T(0), c21 * z, c21 * y);
  set_grad(6, T(-2) * c22 * x, T(-2) * c22 * y, T(4) * c22 * z);
  set_grad(7, c23 * z, T(0), c23 * x);
  set_grad(8, T(2) * c24 * x, T(-2) * c24 * y, T(0));
  if (degree < 3) return;
  const T c30 = T(kC3[0]), c31 = T(kC3[1]), c32 = T(kC3[2]), c33 = T(kC3[3]), c34 = T(kC3[4]), c35 = T(kC3[5]),
          c36 = T(kC3[6]);
  b[9] = c30 * y * (T(3) * xx - yy);
  b[10] = c31 * x * y * z;
  b[11] = c32 * y * (T(4) * zz - xx - yy);
  b[12] = c33 * z * (T(2) * zz - T(3) * xx - T(3) * yy);
  b[13] = c34 * x * (T(4) * zz - xx - yy);
  b[14] = c35 * z * (xx - yy);
  b[15] = c36 * x * (xx - T(3) * yy);
  set_grad(9, T(6) * c30 * x * y, c30 * (T(3) * xx - T(3) * yy), T(0));
  set_grad(10, c31 * y * z, c31 * x * z, c31 * x * y);
  set_grad(11, T(-2) * c32 * x * y, c32 * (T(4) * zz - xx - T(3) * yy), T(8) * c32 * y * z);
  set_grad(12, T(-6) * c33 * x * z, T(-6) * c33 * y * z, c33 * (T(6) * zz - T(3) * xx - T(3) * yy));
  set_grad(13, c34 * (T(4) * zz - T(3) * xx - yy), T(-2) * c34 * x * y, T(8) * c34 * x * z);
  set_grad(14, T(2) * c35 * x * z, T(-2) * c35 * y * z, c35 * (xx - yy));
  set_grad(15, c36 * (T(3) * xx - T(3) * yy), T(-6) * c36 * x * y, T(0));
}

template <class T>
std::array<T, 3> evaluate_sh(int degree, const T* coeffs, const std::array<T, 3>& dir) {
  const double n = std::sqrt(double(dir[0]) * dir[0] + double(dir[1]) * dir[1] + double(dir[2]) * dir[2]);
  if (!(std::abs(n - 1.0) <= 1e-6)) throw std::invalid_argument("SH direction must be unit length");
  T basis[16];
  sh_basis<T>(degree, dir.data(), basis);
  std::array<T, 3> rgb{T(0.5), T(0.5), T(0.5)};
  for (int k = 0; k < sh_basis_count(degree); ++k)
    for (int c = 0; c < 3; ++c) rgb[c] += basis[k] * coeffs[3 * k + c];
  for (T& v : rgb) v = v > T(0) ? v : T(0);
  return rgb;
}

template void sh_basis<float>(int, const float*, float*, float*);
template void sh_basis<double>(int, const double*, double*, double*);
template std::array<float, 3> evaluate_sh<float>(int, const float*, const std::array<float, 3>&);
template std::array<double, 3> evaluate_sh<double>(int, const double*, const std::array<double, 3>&);

}  // namespace lodhead

// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>

namespace lodhead {

inline constexpr int kMaxShDegree = 3;
inline constexpr int sh_basis_count(int degree) { return (degree + 1) * (degree + 1); }
inline constexpr int sh_coeff_count(int degree) { return 3 * sh_basis_count(degree); }

/// Real SH basis (3DGS sign convention) up to `degree` at unit direction
/// (x, y, z). When `grad` is non-null it receives d basis_k / d(x, y, z) as
/// grad[3k + axis].
template <class T>
void sh_basis(int degree, const T dir[3], T* basis, T* grad = nullptr);

/// RGB = sum_k basis_k * coeffs[3k + c] + 0.5, clamped at zero. Coefficients
/// are basis-major: coeffs[3k + channel]. Throws if |dir| deviates from 1 by
/// more than 1e-6.
template <class T>
std::array<T, 3> evaluate_sh(int degree, const T* coeffs, const std::array<T, 3>& dir);

}  // namespace lodhead

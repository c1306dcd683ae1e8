// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

// Compiled with -mavx2 -mfma. Only reached through the runtime dispatcher.

#include <immintrin.h>

#include "lodhead/simd/kernels.hpp"

namespace lodhead::simd::avx2 {
namespace {

// A element (i, p) lives at a[i * a_row + p * a_col]; this covers both the
// plain and the transposed left operand with one micro-kernel.
struct LeftOperand {
  const float* a;
  std::size_t a_row;
  std::size_t a_col;
  float at(int i, int p) const { return a[i * a_row + p * a_col]; }
};

inline void store_block(float* dst, __m256 v, bool accumulate) {
  if (accumulate) v = _mm256_add_ps(v, _mm256_loadu_ps(dst));
  _mm256_storeu_ps(dst, v);
}

// 4 x 16 register tile.
inline void tile_4x16(const LeftOperand& a, int i, int k, const float* b, int ldb, int j,
                      float* c, int ldc, bool accumulate) {
  __m256 c00 = _mm256_setzero_ps(), c01 = _mm256_setzero_ps();
  __m256 c10 = _mm256_setzero_ps(), c11 = _mm256_setzero_ps();
  __m256 c20 = _mm256_setzero_ps(), c21 = _mm256_setzero_ps();
  __m256 c30 = _mm256_setzero_ps(), c31 = _mm256_setzero_ps();
  for (int p = 0; p < k; ++p) {
    const float* brow = b + static_cast<std::size_t>(p) * ldb + j;
    const __m256 b0 = _mm256_loadu_ps(brow);
    const __m256 b1 = _mm256_loadu_ps(brow + 8);
    __m256 av = _mm256_set1_ps(a.at(i, p));
    c00 = _mm256_fmadd_ps(av, b0, c00);
    c01 = _mm256_fmadd_ps(av, b1, c01);
    av = _mm256_set1_ps(a.at(i + 1, p));
    c10 = _mm256_fmadd_ps(av, b0, c10);
    c11 = _mm256_fmadd_ps(av, b1, c11);
    av = _mm256_set1_ps(a.at(i + 2, p));
    c20 = _mm256_fmadd_ps(av, b0, c20);
    c21 = _mm256_fmadd_ps(av, b1, c21);
    av = _mm256_set1_ps(a.at(i + 3, p));
    c30 = _mm256_fmadd_ps(av, b0, c30);
    c31 = _mm256_fmadd_ps(av, b1, c31);
  }
  float* r0 = c + static_cast<std::size_t>(i) * ldc + j;
  store_block(r0, c00, accumulate);
  store_block(r0 + 8, c01, accumulate);
  float* r1 = r0 + ldc;
  store_block(r1, c10, accumulate);
  store_block(r1 + 8, c11, accumulate);
  float* r2 = r1 + ldc;
  store_block(r2, c20, accumulate);
  store_block(r2 + 8, c21, accumulate);
  float* r3 = r2 + ldc;
  store_block(r3, c30, accumulate);
  store_block(r3 + 8, c31, accumulate);
}

// 1 x 8 tile for row / column remainders.
inline void tile_1x8(const LeftOperand& a, int i, int k, const float* b, int ldb, int j, float* c,
                     int ldc, bool accumulate) {
  __m256 acc = _mm256_setzero_ps();
  for (int p = 0; p < k; ++p)
    acc = _mm256_fmadd_ps(_mm256_set1_ps(a.at(i, p)),
                          _mm256_loadu_ps(b + static_cast<std::size_t>(p) * ldb + j), acc);
  store_block(c + static_cast<std::size_t>(i) * ldc + j, acc, accumulate);
}

inline void scalar_cell(const LeftOperand& a, int i, int k, const float* b, int ldb, int j,
                        float* c, int ldc, bool accumulate) {
  float acc = 0.0f;
  for (int p = 0; p < k; ++p) acc += a.at(i, p) * b[static_cast<std::size_t>(p) * ldb + j];
  float& dst = c[static_cast<std::size_t>(i) * ldc + j];
  dst = accumulate ? dst + acc : acc;
}

void gemm(int m, int n, int k, const LeftOperand& a, const float* b, int ldb, float* c, int ldc,
          bool accumulate) {
  const int n16 = n - n % 16;
  const int n8 = n - n % 8;
  const int m4 = m - m % 4;
  for (int i = 0; i < m4; i += 4) {
    for (int j = 0; j < n16; j += 16) tile_4x16(a, i, k, b, ldb, j, c, ldc, accumulate);
    for (int r = i; r < i + 4; ++r) {
      for (int j = n16; j < n8; j += 8) tile_1x8(a, r, k, b, ldb, j, c, ldc, accumulate);
      for (int j = n8; j < n; ++j) scalar_cell(a, r, k, b, ldb, j, c, ldc, accumulate);
    }
  }
  for (int r = m4; r < m; ++r) {
    for (int j = 0; j < n8; j += 8) tile_1x8(a, r, k, b, ldb, j, c, ldc, accumulate);
    for (int j = n8; j < n; ++j) scalar_cell(a, r, k, b, ldb, j, c, ldc, accumulate);
  }
}

}  // namespace

void gemm_nn(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c,
             int ldc, bool accumulate) {
  gemm(m, n, k, LeftOperand{a, static_cast<std::size_t>(lda), 1}, b, ldb, c, ldc, accumulate);
}

void gemm_tn(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c,
             int ldc, bool accumulate) {
  gemm(m, n, k, LeftOperand{a, 1, static_cast<std::size_t>(lda)}, b, ldb, c, ldc, accumulate);
}

void axpy(std::size_t n, float alpha, const float* x, float* y) {
  const __m256 av = _mm256_set1_ps(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(y + i, _mm256_fmadd_ps(av, _mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace lodhead::simd::avx2

// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#include "lodhead/simd/kernels.hpp"

namespace lodhead::simd::scalar {

template <class T>
void gemm_nn(int m, int n, int k, const T* a, int lda, const T* b, int ldb, T* c, int ldc,
             bool accumulate) {
  for (int i = 0; i < m; ++i) {
    T* crow = c + static_cast<std::size_t>(i) * ldc;
    if (!accumulate)
      for (int j = 0; j < n; ++j) crow[j] = T(0);
    const T* arow = a + static_cast<std::size_t>(i) * lda;
    for (int p = 0; p < k; ++p) {
      const T av = arow[p];
      const T* brow = b + static_cast<std::size_t>(p) * ldb;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

template <class T>
void gemm_tn(int m, int n, int k, const T* a, int lda, const T* b, int ldb, T* c, int ldc,
             bool accumulate) {
  if (!accumulate)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) c[static_cast<std::size_t>(i) * ldc + j] = T(0);
  for (int p = 0; p < k; ++p) {
    const T* arow = a + static_cast<std::size_t>(p) * lda;
    const T* brow = b + static_cast<std::size_t>(p) * ldb;
    for (int i = 0; i < m; ++i) {
      const T av = arow[i];
      T* crow = c + static_cast<std::size_t>(i) * ldc;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

template <class T>
void axpy(std::size_t n, T alpha, const T* x, T* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template void gemm_nn<float>(int, int, int, const float*, int, const float*, int, float*, int,
                             bool);
template void gemm_nn<double>(int, int, int, const double*, int, const double*, int, double*, int,
                              bool);
template void gemm_tn<float>(int, int, int, const float*, int, const float*, int, float*, int,
                             bool);
template void gemm_tn<double>(int, int, int, const double*, int, const double*, int, double*, int,
                              bool);
template void axpy<float>(std::size_t, float, const float*, float*);
template void axpy<double>(std::size_t, double, const double*, double*);

}  // namespace lodhead::simd::scalar

// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Data-parallel inner loops used by the feature field, the dense layers and
// the decoder. Every kernel has a scalar reference implementation; float has
// an AVX2/FMA variant picked at runtime when the CPU supports it. double
// always runs the scalar path (gradient checks only).

#include <cstddef>

namespace lodhead::simd {

enum class Isa { scalar, avx2 };

const char* isa_name(Isa isa);

// True when the binary carries AVX2 kernels and the CPU executes them.
bool avx2_available();

// Best available ISA unless overridden with set_isa / ScopedIsa.
Isa active_isa();

// Throws std::runtime_error when the requested ISA is unavailable.
void set_isa(Isa isa);

class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa);
  ~ScopedIsa();
  ScopedIsa(const ScopedIsa&) = delete;
  ScopedIsa& operator=(const ScopedIsa&) = delete;

 private:
  Isa previous_;
};

// Row-major GEMM. C is m x n with leading dimension ldc.
//   gemm_nn: C (+)= A * B,    A is m x k (lda), B is k x n (ldb)
//   gemm_tn: C (+)= A^T * B,  A is k x m (lda), B is k x n (ldb)
// When accumulate is false C is overwritten.
template <class T>
void gemm_nn(int m, int n, int k, const T* a, int lda, const T* b, int ldb, T* c, int ldc,
             bool accumulate);
template <class T>
void gemm_tn(int m, int n, int k, const T* a, int lda, const T* b, int ldb, T* c, int ldc,
             bool accumulate);

// y += alpha * x
template <class T>
void axpy(std::size_t n, T alpha, const T* x, T* y);

namespace scalar {
template <class T>
void gemm_nn(int m, int n, int k, const T* a, int lda, const T* b, int ldb, T* c, int ldc,
             bool accumulate);
template <class T>
void gemm_tn(int m, int n, int k, const T* a, int lda, const T* b, int ldb, T* c, int ldc,
             bool accumulate);
template <class T>
void axpy(std::size_t n, T alpha, const T* x, T* y);
}  // namespace scalar

#if defined(LODHEAD_HAVE_AVX2)
namespace avx2 {
void gemm_nn(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c,
             int ldc, bool accumulate);
void gemm_tn(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c,
             int ldc, bool accumulate);
void axpy(std::size_t n, float alpha, const float* x, float* y);
}  // namespace avx2
#endif

}  // namespace lodhead::simd

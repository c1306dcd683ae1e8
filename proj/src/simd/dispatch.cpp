// Copyright 2026 The lodhead Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <stdexcept>

#include "lodhead/simd/kernels.hpp"

namespace lodhead::simd {
namespace {

Isa detect() {
#if defined(LODHEAD_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Isa::avx2;
#endif
  return Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

bool avx2_available() {
  static const bool available = detect() == Isa::avx2;
  return available;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (isa == Isa::avx2 && !avx2_available())
    throw std::runtime_error("AVX2 kernels are not available on this machine");
  current().store(isa, std::memory_order_relaxed);
}

ScopedIsa::ScopedIsa(Isa isa) : previous_(active_isa()) { set_isa(isa); }
ScopedIsa::~ScopedIsa() { current().store(previous_, std::memory_order_relaxed); }

template <>
void gemm_nn<float>(int m, int n, int k, const float* a, int lda, const float* b, int ldb,
                    float* c, int ldc, bool accumulate) {
#if defined(LODHEAD_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return avx2::gemm_nn(m, n, k, a, lda, b, ldb, c, ldc, accumulate);
#endif
  scalar::gemm_nn(m, n, k, a, lda, b, ldb, c, ldc, accumulate);
}

template <>
void gemm_nn<double>(int m, int n, int k, const double* a, int lda, const double* b, int ldb,
                     double* c, int ldc, bool accumulate) {
  scalar::gemm_nn(m, n, k, a, lda, b, ldb, c, ldc, accumulate);
}

template <>
void gemm_tn<float>(int m, int n, int k, const float* a, int lda, const float* b, int ldb,
                    float* c, int ldc, bool accumulate) {
#if defined(LODHEAD_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return avx2::gemm_tn(m, n, k, a, lda, b, ldb, c, ldc, accumulate);
#endif
  scalar::gemm_tn(m, n, k, a, lda, b, ldb, c, ldc, accumulate);
}

template <>
void gemm_tn<double>(int m, int n, int k, const double* a, int lda, const double* b, int ldb,
                     double* c, int ldc, bool accumulate) {
  scalar::gemm_tn(m, n, k, a, lda, b, ldb, c, ldc, accumulate);
}

template <>
void axpy<float>(std::size_t n, float alpha, const float* x, float* y) {
#if defined(LODHEAD_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return avx2::axpy(n, alpha, x, y);
#endif
  scalar::axpy(n, alpha, x, y);
}

template <>
void axpy<double>(std::size_t n, double alpha, const double* x, double* y) {
  scalar::axpy(n, alpha, x, y);
}

}  // namespace lodhead::simd

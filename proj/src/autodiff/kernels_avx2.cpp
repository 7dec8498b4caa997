#include "mimres/autodiff/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define MIMRES_HAVE_AVX2 1
#include <immintrin.h>
#else
#define MIMRES_HAVE_AVX2 0
#endif

namespace mimres::kernels {

#if MIMRES_HAVE_AVX2
namespace {

#define MIMRES_AVX2 __attribute__((target("avx2,fma")))

// out[l] += sum_j coef(j) * in[j][l] for one output row, 16 lanes per step.
template <typename Coef>
MIMRES_AVX2 inline void accumulate_row(Coef coef, std::size_t terms, const double* in, double* out,
                                      std::size_t len) {
  std::size_t l = 0;
  for (; l + 16 <= len; l += 16) {
    __m256d a0 = _mm256_loadu_pd(out + l);
    __m256d a1 = _mm256_loadu_pd(out + l + 4);
    __m256d a2 = _mm256_loadu_pd(out + l + 8);
    __m256d a3 = _mm256_loadu_pd(out + l + 12);
    for (std::size_t j = 0; j < terms; ++j) {
      const __m256d w = _mm256_set1_pd(coef(j));
      const double* x = in + j * len + l;
      a0 = _mm256_fmadd_pd(w, _mm256_loadu_pd(x), a0);
      a1 = _mm256_fmadd_pd(w, _mm256_loadu_pd(x + 4), a1);
      a2 = _mm256_fmadd_pd(w, _mm256_loadu_pd(x + 8), a2);
      a3 = _mm256_fmadd_pd(w, _mm256_loadu_pd(x + 12), a3);
    }
    _mm256_storeu_pd(out + l, a0);
    _mm256_storeu_pd(out + l + 4, a1);
    _mm256_storeu_pd(out + l + 8, a2);
    _mm256_storeu_pd(out + l + 12, a3);
  }
  for (; l + 4 <= len; l += 4) {
    __m256d a = _mm256_loadu_pd(out + l);
    for (std::size_t j = 0; j < terms; ++j) {
      a = _mm256_fmadd_pd(_mm256_set1_pd(coef(j)), _mm256_loadu_pd(in + j * len + l), a);
    }
    _mm256_storeu_pd(out + l, a);
  }
  for (; l < len; ++l) {
    double a = out[l];
    for (std::size_t j = 0; j < terms; ++j) a += coef(j) * in[j * len + l];
    out[l] = a;
  }
}

MIMRES_AVX2 void gemm(const double* w, std::size_t rows, std::size_t cols, const double* x,
                      double* y, std::size_t len) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* wi = w + i * cols;
    accumulate_row([wi](std::size_t j) { return wi[j]; }, cols, x, y + i * len, len);
  }
}

MIMRES_AVX2 void gemm_tn(const double* w, std::size_t rows, std::size_t cols, const double* dy,
                         double* dx, std::size_t len) {
  for (std::size_t j = 0; j < cols; ++j) {
    accumulate_row([w, cols, j](std::size_t i) { return w[i * cols + j]; }, rows, dy, dx + j * len,
                   len);
  }
}

MIMRES_AVX2 inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

MIMRES_AVX2 double dot(const double* a, const double* b, std::size_t len) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  __m256d s2 = _mm256_setzero_pd();
  __m256d s3 = _mm256_setzero_pd();
  std::size_t l = 0;
  for (; l + 16 <= len; l += 16) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + l), _mm256_loadu_pd(b + l), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + l + 4), _mm256_loadu_pd(b + l + 4), s1);
    s2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + l + 8), _mm256_loadu_pd(b + l + 8), s2);
    s3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + l + 12), _mm256_loadu_pd(b + l + 12), s3);
  }
  for (; l + 4 <= len; l += 4) s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + l), _mm256_loadu_pd(b + l), s0);
  double s = hsum(_mm256_add_pd(_mm256_add_pd(s0, s1), _mm256_add_pd(s2, s3)));
  for (; l < len; ++l) s += a[l] * b[l];
  return s;
}

MIMRES_AVX2 void gemm_nt(const double* dy, std::size_t rows, const double* x, std::size_t cols,
                         double* dw, std::size_t len) {
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) dw[i * cols + j] += dot(dy + i * len, x + j * len, len);
  }
}

MIMRES_AVX2 void mul_acc(const double* a, const double* b, double* out, std::size_t len) {
  std::size_t l = 0;
  for (; l + 4 <= len; l += 4) {
    const __m256d o = _mm256_loadu_pd(out + l);
    _mm256_storeu_pd(out + l, _mm256_fmadd_pd(_mm256_loadu_pd(a + l), _mm256_loadu_pd(b + l), o));
  }
  for (; l < len; ++l) out[l] += a[l] * b[l];
}

MIMRES_AVX2 void axpy(double alpha, const double* x, double* y, std::size_t len) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t l = 0;
  for (; l + 4 <= len; l += 4) {
    _mm256_storeu_pd(y + l, _mm256_fmadd_pd(a, _mm256_loadu_pd(x + l), _mm256_loadu_pd(y + l)));
  }
  for (; l < len; ++l) y[l] += alpha * x[l];
}

const KernelTable kAvx2{"avx2", gemm, gemm_tn, gemm_nt, mul_acc, axpy, dot};

}  // namespace

const KernelTable* avx2_table() {
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &kAvx2 : nullptr;
}

#else

const KernelTable* avx2_table() { return nullptr; }

#endif

}  // namespace mimres::kernels

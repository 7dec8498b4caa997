#pragma once

#include <cstddef>
#include <string_view>

// Dense inner loops of the jet-batch tape. A scalar reference table is always
// available; a SIMD table is selected at runtime when the CPU supports it.
// MIMRES_KERNELS=scalar|avx2 overrides the automatic choice.

namespace mimres::kernels {

struct KernelTable {
  const char* name;
  /// y[rows][len] += w[rows][cols] * x[cols][len]
  void (*gemm)(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y,
               std::size_t len);
  /// dx[cols][len] += w^T * dy[rows][len]
  void (*gemm_tn)(const double* w, std::size_t rows, std::size_t cols, const double* dy, double* dx,
                  std::size_t len);
  /// dw[rows][cols] += dy[rows][len] * x[cols][len]^T
  void (*gemm_nt)(const double* dy, std::size_t rows, const double* x, std::size_t cols, double* dw,
                  std::size_t len);
  /// out[i] += a[i] * b[i]
  void (*mul_acc)(const double* a, const double* b, double* out, std::size_t len);
  /// y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t len);
  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t len);
};

const KernelTable& scalar_table();
/// nullptr when the SIMD variant was not compiled in or the CPU lacks it.
const KernelTable* avx2_table();

const KernelTable& active();
/// Switches the active table; returns false for an unknown or unavailable name.
bool select(std::string_view name);

}  // namespace mimres::kernels

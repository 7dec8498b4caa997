#include "mimres/autodiff/kernels.hpp"

namespace mimres::kernels {
namespace {

void gemm(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y,
          std::size_t len) {
  for (std::size_t i = 0; i < rows; ++i) {
    double* yi = y + i * len;
    for (std::size_t j = 0; j < cols; ++j) {
      const double wij = w[i * cols + j];
      const double* xj = x + j * len;
      for (std::size_t l = 0; l < len; ++l) yi[l] += wij * xj[l];
    }
  }
}

void gemm_tn(const double* w, std::size_t rows, std::size_t cols, const double* dy, double* dx,
             std::size_t len) {
  for (std::size_t j = 0; j < cols; ++j) {
    double* dxj = dx + j * len;
    for (std::size_t i = 0; i < rows; ++i) {
      const double wij = w[i * cols + j];
      const double* dyi = dy + i * len;
      for (std::size_t l = 0; l < len; ++l) dxj[l] += wij * dyi[l];
    }
  }
}

double dot(const double* a, const double* b, std::size_t len) {
  double s = 0.0;
  for (std::size_t l = 0; l < len; ++l) s += a[l] * b[l];
  return s;
}

void gemm_nt(const double* dy, std::size_t rows, const double* x, std::size_t cols, double* dw,
             std::size_t len) {
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) dw[i * cols + j] += dot(dy + i * len, x + j * len, len);
  }
}

void mul_acc(const double* a, const double* b, double* out, std::size_t len) {
  for (std::size_t l = 0; l < len; ++l) out[l] += a[l] * b[l];
}

void axpy(double alpha, const double* x, double* y, std::size_t len) {
  for (std::size_t l = 0; l < len; ++l) y[l] += alpha * x[l];
}

const KernelTable kScalar{"scalar", gemm, gemm_tn, gemm_nt, mul_acc, axpy, dot};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace mimres::kernels

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mimres/autodiff/jet.hpp"

namespace mimres {

/// A batch of jet-valued vectors, laid out [row][coefficient][batch] so that
/// every (row, coefficient) pair is a contiguous run over the batch.
class JetTensor {
 public:
  JetTensor() = default;
  JetTensor(std::size_t rows, JetShape shape, std::size_t batch);

  static JetTensor scalar(double value);

  std::size_t rows() const { return rows_; }
  JetShape shape() const { return shape_; }
  std::size_t coeffs() const { return shape_.size(); }
  std::size_t batch() const { return batch_; }
  /// Length of one row: coeffs() * batch().
  std::size_t row_length() const { return coeffs() * batch_; }
  std::size_t size() const { return data_.size(); }

  double* row(std::size_t r) { return data_.data() + r * row_length(); }
  const double* row(std::size_t r) const { return data_.data() + r * row_length(); }
  double* coeff(std::size_t r, std::size_t c) { return row(r) + c * batch_; }
  const double* coeff(std::size_t r, std::size_t c) const { return row(r) + c * batch_; }

  double& at(std::size_t r, std::size_t c, std::size_t b) { return data_[(r * coeffs() + c) * batch_ + b]; }
  double at(std::size_t r, std::size_t c, std::size_t b) const { return data_[(r * coeffs() + c) * batch_ + b]; }

  Jet jet(std::size_t r, std::size_t b) const;
  void set_jet(std::size_t r, std::size_t b, const Jet& value);

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool same_layout(const JetTensor& other) const {
    return rows_ == other.rows_ && shape_ == other.shape_ && batch_ == other.batch_;
  }

 private:
  std::size_t rows_ = 0;
  JetShape shape_{};
  std::size_t batch_ = 0;
  std::vector<double> data_;
};

// Layer primitives shared by the tape and by tape-free evaluation.

/// y = W x (+ b on coefficient 0). W is out_rows x x.rows() row-major.
JetTensor affine_forward(std::span<const double> weights, std::span<const double> bias,
                         const JetTensor& x, std::size_t out_rows);

/// sigma applied row- and batch-wise. When `derivative` is non-null it
/// receives sigma'(x) as a jet tensor (needed for the reverse pass).
JetTensor activation_forward(ActivationKind kind, const JetTensor& x, JetTensor* derivative);

/// Truncated jet product, elementwise over rows and batch.
JetTensor jet_product(const JetTensor& a, const JetTensor& b);

/// out[r % out_rows] += x[r]: the fixed shortcut embedding into the width.
JetTensor fold_rows(const JetTensor& x, std::size_t out_rows);

void add_into(JetTensor& target, const JetTensor& x, double scale = 1.0);

}  // namespace mimres

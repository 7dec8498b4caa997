#include "mimres/autodiff/jet_tensor.hpp"

#include <algorithm>
#include <string>

#include "mimres/autodiff/kernels.hpp"

namespace mimres {

JetTensor::JetTensor(std::size_t rows, JetShape shape, std::size_t batch)
    : rows_(rows), shape_(shape), batch_(batch) {
  validate(shape);
  data_.assign(rows * shape.size() * batch, 0.0);
}

JetTensor JetTensor::scalar(double value) {
  JetTensor t(1, JetShape{}, 1);
  t.data_[0] = value;
  return t;
}

Jet JetTensor::jet(std::size_t r, std::size_t b) const {
  Jet out(shape_);
  for (std::size_t c = 0; c < coeffs(); ++c) out[c] = at(r, c, b);
  return out;
}

void JetTensor::set_jet(std::size_t r, std::size_t b, const Jet& value) {
  if (!(value.shape() == shape_)) throw ShapeError("set_jet: jet shape mismatch");
  for (std::size_t c = 0; c < coeffs(); ++c) at(r, c, b) = value[c];
}

JetTensor affine_forward(std::span<const double> weights, std::span<const double> bias,
                         const JetTensor& x, std::size_t out_rows) {
  if (weights.size() != out_rows * x.rows()) {
    throw ShapeError("affine: weight count " + std::to_string(weights.size()) + " != " +
                     std::to_string(out_rows) + "x" + std::to_string(x.rows()));
  }
  if (!bias.empty() && bias.size() != out_rows) throw ShapeError("affine: bias size mismatch");
  JetTensor y(out_rows, x.shape(), x.batch());
  if (!bias.empty()) {
    for (std::size_t i = 0; i < out_rows; ++i) std::fill_n(y.coeff(i, 0), x.batch(), bias[i]);
  }
  kernels::active().gemm(weights.data(), out_rows, x.rows(), x.row(0), y.row(0), x.row_length());
  return y;
}

namespace {

void convolve_row(const std::vector<ConvTerm>& terms, const double* a, const double* b, double* out,
                  std::size_t batch) {
  const auto& k = kernels::active();
  for (const ConvTerm& t : terms) k.mul_acc(a + t.lhs * batch, b + t.rhs * batch, out + t.out * batch, batch);
}

void apply_mask(const std::vector<double>& mask, double* row, std::size_t coeffs, std::size_t batch,
                double scale) {
  for (std::size_t c = 0; c < coeffs; ++c) {
    double* v = row + c * batch;
    for (std::size_t b = 0; b < batch; ++b) v[b] *= scale * mask[b];
  }
}

}  // namespace

JetTensor jet_product(const JetTensor& a, const JetTensor& b) {
  if (!a.same_layout(b)) throw ShapeError("jet product: layout mismatch");
  JetTensor out(a.rows(), a.shape(), a.batch());
  const auto& terms = conv_terms(a.shape());
  for (std::size_t r = 0; r < a.rows(); ++r) convolve_row(terms, a.row(r), b.row(r), out.row(r), a.batch());
  return out;
}

JetTensor activation_forward(ActivationKind kind, const JetTensor& x, JetTensor* derivative) {
  const std::size_t batch = x.batch();
  const std::size_t nc = x.coeffs();
  const std::size_t len = x.row_length();
  const auto& terms = conv_terms(x.shape());
  JetTensor out(x.rows(), x.shape(), batch);
  if (derivative != nullptr) *derivative = JetTensor(x.rows(), x.shape(), batch);

  std::vector<double> mask(batch);
  std::vector<double> square(kind == ActivationKind::ReCU ? len : 0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double* xr = x.row(r);
    double* outr = out.row(r);
    double* dr = derivative != nullptr ? derivative->row(r) : nullptr;
    for (std::size_t b = 0; b < batch; ++b) mask[b] = xr[b] > 0.0 ? 1.0 : 0.0;
    switch (kind) {
      case ActivationKind::Square:
        convolve_row(terms, xr, xr, outr, batch);
        if (dr != nullptr) {
          for (std::size_t l = 0; l < len; ++l) dr[l] = 2.0 * xr[l];
        }
        break;
      case ActivationKind::ReLU:
        std::copy_n(xr, len, outr);
        apply_mask(mask, outr, nc, batch, 1.0);
        if (dr != nullptr) std::copy(mask.begin(), mask.end(), dr);
        break;
      case ActivationKind::ReQU:
        convolve_row(terms, xr, xr, outr, batch);
        apply_mask(mask, outr, nc, batch, 1.0);
        if (dr != nullptr) {
          std::copy_n(xr, len, dr);
          apply_mask(mask, dr, nc, batch, 2.0);
        }
        break;
      case ActivationKind::ReCU:
        std::fill(square.begin(), square.end(), 0.0);
        convolve_row(terms, xr, xr, square.data(), batch);
        convolve_row(terms, square.data(), xr, outr, batch);
        apply_mask(mask, outr, nc, batch, 1.0);
        if (dr != nullptr) {
          std::copy(square.begin(), square.end(), dr);
          apply_mask(mask, dr, nc, batch, 3.0);
        }
        break;
    }
  }
  return out;
}

JetTensor fold_rows(const JetTensor& x, std::size_t out_rows) {
  JetTensor y(out_rows, x.shape(), x.batch());
  const auto& k = kernels::active();
  for (std::size_t r = 0; r < x.rows(); ++r) k.axpy(1.0, x.row(r), y.row(r % out_rows), x.row_length());
  return y;
}

void add_into(JetTensor& target, const JetTensor& x, double scale) {
  if (!target.same_layout(x)) throw ShapeError("add: layout mismatch");
  kernels::active().axpy(scale, x.data().data(), target.data().data(), x.size());
}

}  // namespace mimres

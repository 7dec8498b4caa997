#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

#include "mimres/kinds.hpp"

namespace mimres {

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Truncation orders of a Taylor jet along one or two input directions.
///
/// A univariate jet (Jet1) has `second == 0` and `first` in 0..4. A bivariate
/// jet (Jet2) has both orders in 0..2. Coefficients are stored row-major over
/// (i, j), i.e. flat index i * (second + 1) + j.
struct JetShape {
  int first = 0;
  int second = 0;

  constexpr std::size_t size() const {
    return static_cast<std::size_t>((first + 1) * (second + 1));
  }
  constexpr std::size_t index(int i, int j = 0) const {
    return static_cast<std::size_t>(i * (second + 1) + j);
  }
  constexpr int total_order() const { return first + second; }
  constexpr bool operator==(const JetShape&) const = default;

  static JetShape univariate(int order);
  static JetShape bivariate(int first, int second);
};

/// Throws ShapeError unless the orders are inside the supported limits.
void validate(JetShape shape);

/// One (output, lhs, rhs) coefficient triple of a truncated product: the
/// product's coefficient `out` receives lhs * rhs.
struct ConvTerm {
  unsigned char out;
  unsigned char lhs;
  unsigned char rhs;
};

/// All triples with lhs_multi_index + rhs_multi_index == out_multi_index.
const std::vector<ConvTerm>& conv_terms(JetShape shape);

/// Truncated Taylor expansion f(x + e1 v + e2 w) = sum c_ij e1^i e2^j, with
/// c_ij = (1 / (i! j!)) d^{i+j} f / dv^i dw^j. Fixed inline storage.
class Jet {
 public:
  static constexpr std::size_t kMaxCoeffs = 9;

  Jet() = default;
  explicit Jet(JetShape shape);

  static Jet constant(double value, JetShape shape = {});
  /// x + dir1 * e1 + dir2 * e2 for an input coordinate.
  static Jet variable(double value, double dir1, double dir2, JetShape shape);
  static Jet univariate(std::initializer_list<double> coeffs);
  static Jet univariate(std::span<const double> coeffs);

  JetShape shape() const { return shape_; }
  std::size_t size() const { return shape_.size(); }
  double value() const { return coeffs_[0]; }

  double operator()(int i, int j = 0) const { return coeffs_[shape_.index(i, j)]; }
  double& operator()(int i, int j = 0) { return coeffs_[shape_.index(i, j)]; }
  double operator[](std::size_t flat) const { return coeffs_[flat]; }
  double& operator[](std::size_t flat) { return coeffs_[flat]; }

  std::span<const double> coeffs() const { return {coeffs_.data(), size()}; }
  std::span<double> coeffs() { return {coeffs_.data(), size()}; }

  /// d^{i+j} f / dv^i dw^j, i.e. the coefficient rescaled by i! j!.
  double derivative(int i, int j = 0) const;

  Jet& operator+=(const Jet& other);
  Jet& operator-=(const Jet& other);
  Jet& operator*=(double s);

 private:
  JetShape shape_{};
  std::array<double, kMaxCoeffs> coeffs_{};
};

Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator-(Jet a);
Jet operator*(const Jet& a, const Jet& b);
Jet operator*(double s, Jet a);
Jet operator*(Jet a, double s);
Jet operator+(Jet a, double s);
Jet operator+(double s, Jet a);
Jet operator-(Jet a, double s);
Jet operator-(double s, const Jet& a);

/// f(a) given derivs[k] = f^{(k)}(a.value()) for k = 0..a.shape().total_order().
Jet compose(const Jet& a, std::span<const double> derivs);

Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet exp(const Jet& a);
Jet reciprocal(const Jet& a);

double activation(ActivationKind kind, double x);
double activation_derivative(ActivationKind kind, double x);

/// sigma(a). ReLU/ReQU/ReCU return the zero jet when a.value() <= 0,
/// including exactly at the kink.
Jet activation(ActivationKind kind, const Jet& a);
/// sigma'(a) as a jet, consistent with the kink convention above.
Jet activation_derivative(ActivationKind kind, const Jet& a);

}  // namespace mimres

#include "mimres/autodiff/jet.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>

namespace mimres {

JetShape JetShape::univariate(int order) {
  JetShape s{order, 0};
  validate(s);
  return s;
}

JetShape JetShape::bivariate(int first, int second) {
  JetShape s{first, second};
  validate(s);
  return s;
}

void validate(JetShape shape) {
  const bool uni = shape.second == 0 && shape.first >= 0 && shape.first <= 4;
  const bool bi = shape.first >= 0 && shape.first <= 2 && shape.second >= 0 && shape.second <= 2;
  if (!uni && !bi) {
    throw ShapeError("unsupported jet orders (" + std::to_string(shape.first) + ", " +
                     std::to_string(shape.second) + ")");
  }
}

const std::vector<ConvTerm>& conv_terms(JetShape shape) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::vector<ConvTerm>> cache;
  std::lock_guard lock(mutex);
  auto [it, inserted] = cache.try_emplace({shape.first, shape.second});
  if (inserted) {
    for (int i = 0; i <= shape.first; ++i) {
      for (int j = 0; j <= shape.second; ++j) {
        for (int i1 = 0; i1 <= i; ++i1) {
          for (int j1 = 0; j1 <= j; ++j1) {
            it->second.push_back({static_cast<unsigned char>(shape.index(i, j)),
                                  static_cast<unsigned char>(shape.index(i1, j1)),
                                  static_cast<unsigned char>(shape.index(i - i1, j - j1))});
          }
        }
      }
    }
  }
  return it->second;
}

Jet::Jet(JetShape shape) : shape_(shape) { validate(shape); }

Jet Jet::constant(double value, JetShape shape) {
  Jet j(shape);
  j.coeffs_[0] = value;
  return j;
}

Jet Jet::variable(double value, double dir1, double dir2, JetShape shape) {
  Jet j(shape);
  j.coeffs_[0] = value;
  if (shape.first >= 1) j(1, 0) = dir1;
  if (shape.second >= 1) j(0, 1) = dir2;
  return j;
}

Jet Jet::univariate(std::initializer_list<double> coeffs) {
  return univariate(std::span<const double>(coeffs.begin(), coeffs.size()));
}

Jet Jet::univariate(std::span<const double> coeffs) {
  if (coeffs.empty()) throw ShapeError("jet needs at least one coefficient");
  Jet j(JetShape::univariate(static_cast<int>(coeffs.size()) - 1));
  for (std::size_t k = 0; k < coeffs.size(); ++k) j.coeffs_[k] = coeffs[k];
  return j;
}

double Jet::derivative(int i, int j) const {
  double scale = 1.0;
  for (int k = 2; k <= i; ++k) scale *= k;
  for (int k = 2; k <= j; ++k) scale *= k;
  return scale * (*this)(i, j);
}

namespace {

void require_same(const Jet& a, const Jet& b) {
  if (!(a.shape() == b.shape())) throw ShapeError("jet shape mismatch");
}

}  // namespace

Jet& Jet::operator+=(const Jet& other) {
  require_same(*this, other);
  for (std::size_t k = 0; k < size(); ++k) coeffs_[k] += other.coeffs_[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& other) {
  require_same(*this, other);
  for (std::size_t k = 0; k < size(); ++k) coeffs_[k] -= other.coeffs_[k];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (std::size_t k = 0; k < size(); ++k) coeffs_[k] *= s;
  return *this;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }
Jet operator-(Jet a) { return a *= -1.0; }
Jet operator*(double s, Jet a) { return a *= s; }
Jet operator*(Jet a, double s) { return a *= s; }

Jet operator+(Jet a, double s) {
  a[0] += s;
  return a;
}
Jet operator+(double s, Jet a) { return std::move(a) + s; }
Jet operator-(Jet a, double s) {
  a[0] -= s;
  return a;
}
Jet operator-(double s, const Jet& a) { return (-a) + s; }

Jet operator*(const Jet& a, const Jet& b) {
  require_same(a, b);
  Jet out(a.shape());
  for (const ConvTerm& t : conv_terms(a.shape())) out[t.out] += a[t.lhs] * b[t.rhs];
  return out;
}

Jet compose(const Jet& a, std::span<const double> derivs) {
  const int degree = a.shape().total_order();
  if (static_cast<int>(derivs.size()) < degree + 1) {
    throw ShapeError("compose needs derivatives up to the jet's total order");
  }
  // f(a0 + h) = sum_k f^(k)(a0) / k! h^k, where h = a - a0 is nilpotent.
  Jet h = a;
  h[0] = 0.0;
  std::vector<double> taylor(static_cast<std::size_t>(degree + 1));
  double factorial = 1.0;
  for (int k = 0; k <= degree; ++k) {
    if (k > 0) factorial *= k;
    taylor[static_cast<std::size_t>(k)] = derivs[static_cast<std::size_t>(k)] / factorial;
  }
  Jet out = Jet::constant(taylor.back(), a.shape());
  for (int k = degree - 1; k >= 0; --k) out = out * h + taylor[static_cast<std::size_t>(k)];
  return out;
}

Jet sin(const Jet& a) {
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  const std::array<double, 5> d{s, c, -s, -c, s};
  return compose(a, d);
}

Jet cos(const Jet& a) {
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  const std::array<double, 5> d{c, -s, -c, s, c};
  return compose(a, d);
}

Jet exp(const Jet& a) {
  const double e = std::exp(a.value());
  const std::array<double, 5> d{e, e, e, e, e};
  return compose(a, d);
}

Jet reciprocal(const Jet& a) {
  const double x = a.value();
  // d^k/dx^k x^-1 = (-1)^k k! x^-(k+1)
  std::array<double, 5> d{};
  double term = 1.0 / x;
  for (int k = 0; k < 5; ++k) {
    d[static_cast<std::size_t>(k)] = term;
    term *= -(k + 1) / x;
  }
  return compose(a, d);
}

double activation(ActivationKind kind, double x) {
  switch (kind) {
    case ActivationKind::Square:
      return x * x;
    case ActivationKind::ReLU:
      return x > 0.0 ? x : 0.0;
    case ActivationKind::ReQU:
      return x > 0.0 ? x * x : 0.0;
    case ActivationKind::ReCU:
      return x > 0.0 ? x * x * x : 0.0;
  }
  return 0.0;
}

double activation_derivative(ActivationKind kind, double x) {
  switch (kind) {
    case ActivationKind::Square:
      return 2.0 * x;
    case ActivationKind::ReLU:
      return x > 0.0 ? 1.0 : 0.0;
    case ActivationKind::ReQU:
      return x > 0.0 ? 2.0 * x : 0.0;
    case ActivationKind::ReCU:
      return x > 0.0 ? 3.0 * x * x : 0.0;
  }
  return 0.0;
}

Jet activation(ActivationKind kind, const Jet& a) {
  if (kind == ActivationKind::Square) return a * a;
  if (!(a.value() > 0.0)) return Jet(a.shape());
  switch (kind) {
    case ActivationKind::ReLU:
      return a;
    case ActivationKind::ReQU:
      return a * a;
    case ActivationKind::ReCU:
      return a * a * a;
    default:
      return a;
  }
}

Jet activation_derivative(ActivationKind kind, const Jet& a) {
  if (kind == ActivationKind::Square) return 2.0 * a;
  if (!(a.value() > 0.0)) return Jet(a.shape());
  switch (kind) {
    case ActivationKind::ReLU:
      return Jet::constant(1.0, a.shape());
    case ActivationKind::ReQU:
      return 2.0 * a;
    case ActivationKind::ReCU:
      return 3.0 * (a * a);
    default:
      return a;
  }
}

}  // namespace mimres

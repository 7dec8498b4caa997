#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace mimres {

inline constexpr std::size_t kMaxDeterminantDim = 8;

/// Arithmetic for plain doubles; the tape provides an equivalent set.
struct RealOps {
  double add(double a, double b) const { return a + b; }
  double sub(double a, double b) const { return a - b; }
  double mul(double a, double b) const { return a * b; }
  double neg(double a) const { return -a; }
};

namespace detail {

template <class T, class Ops>
T cofactor_det(const std::vector<T>& a, std::size_t n, const Ops& ops) {
  if (n == 1) return a[0];
  if (n == 2) return ops.sub(ops.mul(a[0], a[3]), ops.mul(a[1], a[2]));
  std::vector<T> minor;
  minor.reserve((n - 1) * (n - 1));
  T result{};
  bool first = true;
  for (std::size_t c = 0; c < n; ++c) {
    minor.clear();
    for (std::size_t r = 1; r < n; ++r) {
      for (std::size_t k = 0; k < n; ++k) {
        if (k != c) minor.push_back(a[r * n + k]);
      }
    }
    const T term = ops.mul(a[c], cofactor_det(minor, n - 1, ops));
    if (first) {
      result = c % 2 == 0 ? term : ops.neg(term);
      first = false;
    } else {
      result = c % 2 == 0 ? ops.add(result, term) : ops.sub(result, term);
    }
  }
  return result;
}

// Bird's division-free algorithm: X <- mu(X) A repeated n - 1 times, where
// mu(X) keeps the strict upper triangle of X and puts minus the trailing
// diagonal sums on its diagonal. mu(X) has a zero last row, so after the first
// step the last row of X is zero and is never stored. T needs no zero element.
template <class T, class Ops>
T bird_det(const std::vector<T>& a, std::size_t n, const Ops& ops) {
  std::vector<T> x = a;
  std::vector<std::optional<T>> mu_diag(n);
  bool last_row_zero = false;
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::optional<T> tail;
    for (std::size_t i = n; i-- > 0;) {
      mu_diag[i] = tail ? std::optional<T>(ops.neg(*tail)) : std::nullopt;
      if (i == n - 1 && last_row_zero) continue;
      tail = tail ? ops.add(*tail, x[i * n + i]) : x[i * n + i];
    }
    std::vector<T> next(n * n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        T acc = ops.mul(x[i * n + n - 1], a[(n - 1) * n + j]);
        for (std::size_t k = i + 1; k + 1 < n; ++k) acc = ops.add(acc, ops.mul(x[i * n + k], a[k * n + j]));
        if (mu_diag[i]) acc = ops.add(acc, ops.mul(*mu_diag[i], a[i * n + j]));
        next[i * n + j] = acc;
      }
    }
    x = std::move(next);
    last_row_zero = true;
  }
  return n % 2 == 1 ? x[0] : ops.neg(x[0]);
}

}  // namespace detail

/// Determinant of a row-major n x n matrix over any T with add/sub/mul/neg:
/// cofactor expansion for n <= 4, Bird's algorithm up to n = 8.
template <class T, class Ops>
T determinant(const std::vector<T>& a, std::size_t n, const Ops& ops) {
  if (n == 0 || a.size() != n * n) throw std::invalid_argument("determinant: matrix must be n x n with n >= 1");
  if (n > kMaxDeterminantDim) throw std::invalid_argument("determinant: dimension above 8 is unsupported");
  return n <= 4 ? detail::cofactor_det(a, n, ops) : detail::bird_det(a, n, ops);
}

inline double determinant(std::span<const double> a, std::size_t n) {
  return determinant(std::vector<double>(a.begin(), a.end()), n, RealOps{});
}

}  // namespace mimres

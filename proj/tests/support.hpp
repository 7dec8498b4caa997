#pragma once

// Oracles and fixtures shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "mimres/losses/losses.hpp"
#include "mimres/network/model.hpp"
#include "mimres/problems/problems.hpp"
#include "mimres/rng.hpp"
#include "mimres/sampling/sampling.hpp"

namespace mimres::test {

/// Leibniz sum over all n! permutations.
inline double permutation_det(std::span<const double> a, std::size_t n) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double total = 0.0;
  do {
    std::size_t inversions = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) inversions += perm[i] > perm[j] ? 1 : 0;
    }
    double term = inversions % 2 == 0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < n; ++i) term *= a[i * n + perm[i]];
    total += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

inline double relative_error(double approx, double exact) {
  const double scale = std::max(std::abs(exact), 1e-300);
  return std::abs(approx - exact) / scale;
}

/// |a - b| / max(|b|, floor) over a vector, as one norm ratio.
inline double relative_error(std::span<const double> approx, std::span<const double> exact, double floor = 1e-12) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    num += (approx[i] - exact[i]) * (approx[i] - exact[i]);
    den += exact[i] * exact[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), floor);
}

/// Tensor-product Gauss-Legendre rule (5 nodes per axis per cell) for
/// integrals over [lo, hi]^dim.
inline double cube_quadrature(const std::function<double(std::span<const double>)>& f, std::size_t dim, double lo,
                              double hi, std::size_t cells = 8) {
  static constexpr double kNodes[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                                       0.9061798459386640};
  static constexpr double kWeights[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                         0.2369268850561891, 0.2369268850561891};
  const double h = (hi - lo) / static_cast<double>(cells);
  std::vector<double> nodes, weights;
  for (std::size_t c = 0; c < cells; ++c) {
    const double mid = lo + (static_cast<double>(c) + 0.5) * h;
    for (int k = 0; k < 5; ++k) {
      nodes.push_back(mid + 0.5 * h * kNodes[k]);
      weights.push_back(0.5 * h * kWeights[k]);
    }
  }
  std::vector<std::size_t> idx(dim, 0);
  std::vector<double> x(dim);
  double total = 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t k = 0; k < dim; ++k) {
      x[k] = nodes[idx[k]];
      w *= weights[idx[k]];
    }
    total += w * f(x);
    std::size_t k = 0;
    while (k < dim && ++idx[k] == nodes.size()) idx[k++] = 0;
    if (k == dim) break;
  }
  return total;
}

/// A model plus a frozen batch: the loss as a function of the parameters,
/// built exactly as training builds it.
class LossProbe {
 public:
  LossProbe(MethodKind method, ProblemKind problem, VariantKind variant, std::size_t dim, std::size_t depth,
            std::size_t width, ActivationKind activation, std::uint64_t seed, std::size_t points = 32)
      : problem_(make_problem(problem, dim)),
        model_(ModelConfig{method, problem, variant, dim, depth, width, activation}, seed),
        method_(method),
        multiplier_(problem == ProblemKind::Poisson && method != MethodKind::DGM) {
    if (multiplier_) wrapped_.emplace(model_.field(), model_.layout().p);
    Sampler sampler(problem_.domain(), {points, points, points, seed});
    batch_ = draw_batch(problem_, sampler);
  }
  LossProbe(const LossProbe&) = delete;
  LossProbe& operator=(const LossProbe&) = delete;

  Model& model() { return model_; }
  const Field& field() const { return multiplier_ ? static_cast<const Field&>(*wrapped_) : model_.field(); }

  double value(std::span<const double> params) {
    model_.set_params(params);
    Tape tape;
    model_.bind(tape);
    return tape.scalar(record(tape).total);
  }

  std::vector<double> gradient(std::span<const double> params) {
    model_.set_params(params);
    Tape tape;
    model_.bind(tape);
    return tape.backward(record(tape).total).gradient;
  }

  LossRecord record(Tape& tape) const {
    return build_loss(tape, problem_, method_, field(), model_.layout(), batch_, weights_, multiplier_);
  }

 private:
  ProblemSpec problem_;
  Model model_;
  MethodKind method_;
  bool multiplier_;
  std::optional<NeumannMultiplierField> wrapped_;
  LossBatch batch_;
  PenaltyWeights weights_;
};

/// Central differences of `f` in every coordinate.
inline std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> x, double h) {
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

inline std::vector<double> uniform_vector(std::size_t n, Rng& rng, double lo, double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

}  // namespace mimres::test

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mimres/autodiff/field.hpp"
#include "mimres/network/model.hpp"
#include "mimres/problems/problems.hpp"
#include "mimres/sampling/sampling.hpp"

namespace mimres {

/// Relative L2 errors; a quantity is empty when the problem does not define
/// it.
struct ErrorSet {
  std::optional<double> u;
  std::optional<double> grad_u;
  std::optional<double> lap_u;
  std::optional<double> grad_lap_u;
  std::optional<double> diag_hess_u;
};

/// Which quantities a problem reports: Poisson and Monge-Ampere (u, grad u),
/// biharmonic (u, grad u, Lap u, grad Lap u), KdV (u, grad u, diag Hess u).
struct QuantityMask {
  bool u = true, grad_u = true, lap_u = false, grad_lap_u = false, diag_hess_u = false;
};
QuantityMask quantities(ProblemKind problem);

/// Fixed evaluation points with cached exact values. Vector quantities are
/// row-major [point][component].
struct EvalSet {
  PointSet points;
  std::size_t dim = 0;
  std::vector<double> u, grad_u, lap_u, grad_lap_u, diag_hess_u;
};

inline constexpr std::size_t kDefaultEvalPoints = 10000;

EvalSet make_eval_set(const ProblemSpec& problem, std::size_t count, std::uint64_t seed);

/// sqrt(sum |a - e|^2 / sum |e|^2). Throws on a zero denominator or a size
/// mismatch.
double relative_l2(std::span<const double> approx, std::span<const double> exact);

/// Errors of a field with the [u | p | q | w] layout. Groups the layout
/// carries are read directly; anything else comes from jets of u (or of q
/// for grad Lap u when only q is present). Never touches a tape.
ErrorSet evaluate_all(const ProblemSpec& problem, const Field& unknowns, const UnknownLayout& layout,
                      const EvalSet& eval, std::size_t chunk = 2048);

/// Where each reported quantity comes from, e.g. "grad_lap_u=jets(q)".
std::string metric_sources(const ProblemSpec& problem, const UnknownLayout& layout);

}  // namespace mimres

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mimres/autodiff/field.hpp"
#include "mimres/kinds.hpp"
#include "mimres/network/model.hpp"

namespace mimres {

enum class DomainKind { UnitCube, SymmetricCube, TorusCube };

/// Spatial cube, optionally times [0, T]. Points are laid out (x_1..x_d[, t]).
struct Domain {
  DomainKind kind = DomainKind::UnitCube;
  std::size_t dim = 1;
  double time_horizon = 0.0;  // 0 for stationary problems

  double lower() const;
  double upper() const;
  double side() const { return upper() - lower(); }
  bool has_time() const { return time_horizon > 0.0; }
  std::size_t point_dim() const { return dim + (has_time() ? 1 : 0); }

  /// |Omega| = side^d and |dOmega| = 2d side^(d-1), spatial only.
  double volume() const;
  double boundary_area() const;
  /// Measures of the sampled sets, including the time interval when present.
  double interior_measure() const;
  double boundary_measure() const;
};

/// One benchmark PDE with its closed-form solution. All point arguments use
/// the domain layout (x_1..x_d[, t]); derivative quantities are spatial.
class ProblemSpec {
 public:
  ProblemSpec(ProblemKind kind, Domain domain);

  ProblemKind kind() const { return kind_; }
  const Domain& domain() const { return domain_; }
  std::size_t dim() const { return domain_.dim; }

  double forcing(std::span<const double> x) const;
  double exact(std::span<const double> x) const;
  std::vector<double> exact_gradient(std::span<const double> x) const;
  double exact_laplacian(std::span<const double> x) const;
  std::vector<double> exact_grad_laplacian(std::span<const double> x) const;
  std::vector<double> exact_hessian_diag(std::span<const double> x) const;

  /// Dirichlet data g (the exact trace).
  double boundary_value(std::span<const double> x) const { return exact(x); }
  /// u_0 at a spatial point (time-dependent problems only).
  double initial_value(std::span<const double> x) const;

  /// Jet-valued exact solution.
  Jet exact_jet(std::span<const Jet> x) const;

  /// Exact unknowns in the [u | p | q | w] layout: p = grad u; q = Laplacian
  /// (biharmonic) or diag of the Hessian (KdV); w = grad Laplacian.
  std::vector<Jet> exact_unknowns(const UnknownLayout& layout, std::span<const Jet> x) const;

  /// PDE residual of the exact solution from its analytic derivatives.
  double exact_residual(std::span<const double> x) const;

 private:
  ProblemKind kind_;
  Domain domain_;
};

/// -Lap u + pi^2 u = f on [0,1]^d, zero Neumann data.
ProblemSpec poisson_spec(std::size_t dim);
/// det(Hess u) = f on [-1,1]^d, Dirichlet data.
ProblemSpec monge_ampere_spec(std::size_t dim);
/// Bilaplacian u = f on [-1,1]^d, Dirichlet and zero Neumann data.
ProblemSpec biharmonic_spec(std::size_t dim);
/// u_t + sum_k u_{x_k x_k x_k} = 0 on [0,T] x [0,2pi]^d, periodic.
ProblemSpec kdv_spec(std::size_t dim, double time_horizon = 1.0);

ProblemSpec make_problem(ProblemKind kind, std::size_t dim, double time_horizon = 1.0);

/// The exact unknowns as a Field, for injecting the analytic solution into
/// losses and metrics.
AnalyticField exact_field(const ProblemSpec& problem, const UnknownLayout& layout);

}  // namespace mimres

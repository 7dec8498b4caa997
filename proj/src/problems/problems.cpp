#include "mimres/problems/problems.hpp"

#include <cmath>
#include <numbers>

#include "mimres/losses/determinant.hpp"

namespace mimres {

namespace {

constexpr double kPi = std::numbers::pi;

double squared_norm(std::span<const double> x, std::size_t d) {
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) s += x[k] * x[k];
  return s;
}

// Sum of the spatial coordinates plus d t: the KdV phase.
double kdv_phase(std::span<const double> x, std::size_t d) {
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) s += x[k];
  return s + static_cast<double>(d) * x[d];
}

}  // namespace

double Domain::lower() const {
  switch (kind) {
    case DomainKind::UnitCube:
    case DomainKind::TorusCube:
      return 0.0;
    case DomainKind::SymmetricCube:
      return -1.0;
  }
  return 0.0;
}

double Domain::upper() const {
  switch (kind) {
    case DomainKind::UnitCube:
      return 1.0;
    case DomainKind::SymmetricCube:
      return 1.0;
    case DomainKind::TorusCube:
      return 2.0 * kPi;
  }
  return 1.0;
}

double Domain::volume() const { return std::pow(side(), static_cast<double>(dim)); }

double Domain::boundary_area() const {
  return 2.0 * static_cast<double>(dim) * std::pow(side(), static_cast<double>(dim) - 1.0);
}

double Domain::interior_measure() const { return volume() * (has_time() ? time_horizon : 1.0); }
double Domain::boundary_measure() const { return boundary_area() * (has_time() ? time_horizon : 1.0); }

ProblemSpec::ProblemSpec(ProblemKind kind, Domain domain) : kind_(kind), domain_(domain) {
  if (domain_.dim == 0) throw ConfigError("dimension must be positive");
  if (kind_ == ProblemKind::KdV && !domain_.has_time()) throw ConfigError("kdv needs a positive time horizon");
  if (kind_ == ProblemKind::MongeAmpere && domain_.dim > kMaxDeterminantDim) {
    throw ConfigError("monge-ampere supports d <= 8");
  }
}

double ProblemSpec::forcing(std::span<const double> x) const {
  const std::size_t d = dim();
  const double dd = static_cast<double>(d);
  switch (kind_) {
    case ProblemKind::Poisson: {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += std::cos(kPi * x[k]);
      return 2.0 * kPi * kPi * s;
    }
    case ProblemKind::MongeAmpere: {
      const double r2 = squared_norm(x, d);
      return std::pow(2.0 / dd, dd) * std::exp(r2) * (1.0 + 2.0 / dd * r2);
    }
    case ProblemKind::Biharmonic: {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += std::sin(kPi * x[k] / 2.0);
      return std::pow(kPi, 4) / 16.0 * s;
    }
    case ProblemKind::KdV:
      return 0.0;
  }
  return 0.0;
}

double ProblemSpec::exact(std::span<const double> x) const {
  const std::size_t d = dim();
  double s = 0.0;
  switch (kind_) {
    case ProblemKind::Poisson:
      for (std::size_t k = 0; k < d; ++k) s += std::cos(kPi * x[k]);
      return s;
    case ProblemKind::MongeAmpere:
      return std::exp(squared_norm(x, d) / static_cast<double>(d));
    case ProblemKind::Biharmonic:
      for (std::size_t k = 0; k < d; ++k) s += std::sin(kPi * x[k] / 2.0);
      return s;
    case ProblemKind::KdV:
      return std::sin(kdv_phase(x, d));
  }
  return 0.0;
}

std::vector<double> ProblemSpec::exact_gradient(std::span<const double> x) const {
  const std::size_t d = dim();
  const double dd = static_cast<double>(d);
  std::vector<double> g(d);
  for (std::size_t k = 0; k < d; ++k) {
    switch (kind_) {
      case ProblemKind::Poisson:
        g[k] = -kPi * std::sin(kPi * x[k]);
        break;
      case ProblemKind::MongeAmpere:
        g[k] = 2.0 * x[k] / dd * exact(x);
        break;
      case ProblemKind::Biharmonic:
        g[k] = kPi / 2.0 * std::cos(kPi * x[k] / 2.0);
        break;
      case ProblemKind::KdV:
        g[k] = std::cos(kdv_phase(x, d));
        break;
    }
  }
  return g;
}

std::vector<double> ProblemSpec::exact_hessian_diag(std::span<const double> x) const {
  const std::size_t d = dim();
  const double dd = static_cast<double>(d);
  std::vector<double> h(d);
  for (std::size_t k = 0; k < d; ++k) {
    switch (kind_) {
      case ProblemKind::Poisson:
        h[k] = -kPi * kPi * std::cos(kPi * x[k]);
        break;
      case ProblemKind::MongeAmpere:
        h[k] = exact(x) * (2.0 / dd + 4.0 * x[k] * x[k] / (dd * dd));
        break;
      case ProblemKind::Biharmonic:
        h[k] = -kPi * kPi / 4.0 * std::sin(kPi * x[k] / 2.0);
        break;
      case ProblemKind::KdV:
        h[k] = -std::sin(kdv_phase(x, d));
        break;
    }
  }
  return h;
}

double ProblemSpec::exact_laplacian(std::span<const double> x) const {
  double s = 0.0;
  for (double h : exact_hessian_diag(x)) s += h;
  return s;
}

std::vector<double> ProblemSpec::exact_grad_laplacian(std::span<const double> x) const {
  const std::size_t d = dim();
  const double dd = static_cast<double>(d);
  std::vector<double> g(d);
  for (std::size_t k = 0; k < d; ++k) {
    switch (kind_) {
      case ProblemKind::Poisson:
        g[k] = kPi * kPi * kPi * std::sin(kPi * x[k]);
        break;
      case ProblemKind::MongeAmpere: {
        const double u = exact(x);
        const double r2 = squared_norm(x, d);
        g[k] = 2.0 * x[k] / dd * u * (2.0 + 4.0 * r2 / (dd * dd)) + u * 8.0 * x[k] / (dd * dd);
        break;
      }
      case ProblemKind::Biharmonic:
        g[k] = -kPi * kPi * kPi / 8.0 * std::cos(kPi * x[k] / 2.0);
        break;
      case ProblemKind::KdV:
        g[k] = -dd * std::cos(kdv_phase(x, d));
        break;
    }
  }
  return g;
}

double ProblemSpec::initial_value(std::span<const double> x) const {
  if (kind_ != ProblemKind::KdV) throw ConfigError("initial data is only defined for time-dependent problems");
  double s = 0.0;
  for (std::size_t k = 0; k < dim(); ++k) s += x[k];
  return std::sin(s);
}

Jet ProblemSpec::exact_jet(std::span<const Jet> x) const {
  const std::size_t d = dim();
  Jet s = Jet::constant(0.0, x[0].shape());
  switch (kind_) {
    case ProblemKind::Poisson:
      for (std::size_t k = 0; k < d; ++k) s += cos(kPi * x[k]);
      return s;
    case ProblemKind::MongeAmpere:
      for (std::size_t k = 0; k < d; ++k) s += x[k] * x[k];
      return exp((1.0 / static_cast<double>(d)) * s);
    case ProblemKind::Biharmonic:
      for (std::size_t k = 0; k < d; ++k) s += sin((kPi / 2.0) * x[k]);
      return s;
    case ProblemKind::KdV:
      for (std::size_t k = 0; k < d; ++k) s += x[k];
      return sin(s + static_cast<double>(d) * x[d]);
  }
  return s;
}

std::vector<Jet> ProblemSpec::exact_unknowns(const UnknownLayout& layout, std::span<const Jet> x) const {
  const std::size_t d = dim();
  const double dd = static_cast<double>(d);
  const JetShape shape = x[0].shape();
  std::vector<Jet> out(layout.total, Jet::constant(0.0, shape));
  const Jet u = exact_jet(x);
  out[layout.u.begin] = u;

  Jet phase = Jet::constant(0.0, shape);
  if (kind_ == ProblemKind::KdV) {
    for (std::size_t k = 0; k < d; ++k) phase += x[k];
    phase += dd * x[d];
  }

  for (std::size_t k = 0; k < layout.p.count; ++k) {
    Jet& p = out[layout.p.begin + k];
    switch (kind_) {
      case ProblemKind::Poisson:
        p = -kPi * sin(kPi * x[k]);
        break;
      case ProblemKind::MongeAmpere:
        p = (2.0 / dd) * (x[k] * u);
        break;
      case ProblemKind::Biharmonic:
        p = (kPi / 2.0) * cos((kPi / 2.0) * x[k]);
        break;
      case ProblemKind::KdV:
        p = cos(phase);
        break;
    }
  }
  if (kind_ == ProblemKind::Biharmonic && layout.q.present()) {
    Jet q = Jet::constant(0.0, shape);
    for (std::size_t k = 0; k < d; ++k) q += (-kPi * kPi / 4.0) * sin((kPi / 2.0) * x[k]);
    out[layout.q.begin] = q;
  }
  if (kind_ == ProblemKind::KdV) {
    for (std::size_t k = 0; k < layout.q.count; ++k) out[layout.q.begin + k] = -sin(phase);
  }
  for (std::size_t k = 0; k < layout.w.count; ++k) {
    out[layout.w.begin + k] = (-kPi * kPi * kPi / 8.0) * cos((kPi / 2.0) * x[k]);
  }
  return out;
}

double ProblemSpec::exact_residual(std::span<const double> x) const {
  const std::size_t d = dim();
  switch (kind_) {
    case ProblemKind::Poisson:
      return -exact_laplacian(x) + kPi * kPi * exact(x) - forcing(x);
    case ProblemKind::MongeAmpere: {
      // Hessian of exp(|x|^2/d): (2/d) u delta_ij + (4/d^2) u x_i x_j.
      const double dd = static_cast<double>(d);
      const double u = exact(x);
      std::vector<double> h(d * d);
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
          h[i * d + j] = 4.0 / (dd * dd) * u * x[i] * x[j] + (i == j ? 2.0 / dd * u : 0.0);
        }
      }
      return determinant(h, d) - forcing(x);
    }
    case ProblemKind::Biharmonic: {
      double bilap = 0.0;
      for (std::size_t k = 0; k < d; ++k) bilap += std::pow(kPi / 2.0, 4) * std::sin(kPi * x[k] / 2.0);
      return bilap - forcing(x);
    }
    case ProblemKind::KdV: {
      const double s = kdv_phase(x, d);
      const double u_t = static_cast<double>(d) * std::cos(s);
      const double u_xxx = -std::cos(s);
      return u_t + static_cast<double>(d) * u_xxx - forcing(x);
    }
  }
  return 0.0;
}

ProblemSpec poisson_spec(std::size_t dim) { return {ProblemKind::Poisson, {DomainKind::UnitCube, dim, 0.0}}; }

ProblemSpec monge_ampere_spec(std::size_t dim) {
  return {ProblemKind::MongeAmpere, {DomainKind::SymmetricCube, dim, 0.0}};
}

ProblemSpec biharmonic_spec(std::size_t dim) {
  return {ProblemKind::Biharmonic, {DomainKind::SymmetricCube, dim, 0.0}};
}

ProblemSpec kdv_spec(std::size_t dim, double time_horizon) {
  if (!(time_horizon > 0.0)) throw ConfigError("time horizon must be positive");
  return {ProblemKind::KdV, {DomainKind::TorusCube, dim, time_horizon}};
}

ProblemSpec make_problem(ProblemKind kind, std::size_t dim, double time_horizon) {
  switch (kind) {
    case ProblemKind::Poisson:
      return poisson_spec(dim);
    case ProblemKind::MongeAmpere:
      return monge_ampere_spec(dim);
    case ProblemKind::Biharmonic:
      return biharmonic_spec(dim);
    case ProblemKind::KdV:
      return kdv_spec(dim, time_horizon);
  }
  throw ConfigError("unknown problem");
}

AnalyticField exact_field(const ProblemSpec& problem, const UnknownLayout& layout) {
  return AnalyticField(problem.domain().point_dim(), layout.total,
                       [problem, layout](std::span<const Jet> x) { return problem.exact_unknowns(layout, x); });
}

}  // namespace mimres

#include "mimres/sampling/sampling.hpp"

#include <numbers>

namespace mimres {

Rng make_stream(std::uint64_t seed, StreamPurpose purpose) {
  return Rng::stream(seed, static_cast<std::uint64_t>(purpose));
}

namespace {

void fill_point(const Domain& domain, std::span<double> p, Rng& rng) {
  for (std::size_t k = 0; k < domain.dim; ++k) p[k] = rng.uniform(domain.lower(), domain.upper());
  if (domain.has_time()) p[domain.dim] = rng.uniform(0.0, domain.time_horizon);
}

}  // namespace

PointSet sample_interior(const Domain& domain, std::size_t count, Rng& rng) {
  PointSet set{domain.point_dim(), std::vector<double>(count * domain.point_dim())};
  for (std::size_t i = 0; i < count; ++i) fill_point(domain, set.point(i), rng);
  return set;
}

BoundarySet sample_boundary(const Domain& domain, std::size_t count, Rng& rng) {
  const std::size_t dim = domain.point_dim();
  BoundarySet set;
  set.points = {dim, std::vector<double>(count * dim)};
  set.normals.assign(count * dim, 0.0);
  set.faces.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t face = static_cast<std::size_t>(rng.below(2 * domain.dim));
    const std::size_t axis = face / 2;
    const bool upper = face % 2 == 1;
    std::span<double> p = set.points.point(i);
    fill_point(domain, p, rng);
    p[axis] = upper ? domain.upper() : domain.lower();
    set.normals[i * dim + axis] = upper ? 1.0 : -1.0;
    set.faces[i] = face;
  }
  return set;
}

PointSet sample_initial(const Domain& domain, std::size_t count, Rng& rng) {
  PointSet set = sample_interior(domain, count, rng);
  if (domain.has_time()) {
    for (std::size_t i = 0; i < count; ++i) set.point(i)[domain.dim] = 0.0;
  }
  return set;
}

std::vector<double> periodic_partner(const Domain& domain, std::span<const double> x, std::size_t axis) {
  if (domain.kind != DomainKind::TorusCube) throw ConfigError("periodic partners need the torus domain");
  if (axis >= domain.dim) throw ConfigError("periodic partner axis out of range");
  std::vector<double> y(x.begin(), x.end());
  y[axis] += 2.0 * std::numbers::pi;
  return y;
}

Sampler::Sampler(const Domain& domain, const SamplerConfig& config)
    : domain_(domain),
      config_(config),
      interior_(make_stream(config.seed, StreamPurpose::Interior)),
      boundary_(make_stream(config.seed, StreamPurpose::Boundary)),
      initial_(make_stream(config.seed, StreamPurpose::Initial)),
      periodic_(make_stream(config.seed, StreamPurpose::Periodic)) {
  if (config.interior == 0 || config.boundary == 0) throw ConfigError("batch sizes must be positive");
  if (domain.has_time() && config.initial == 0) throw ConfigError("initial batch size must be positive");
}

PointSet Sampler::interior() { return sample_interior(domain_, config_.interior, interior_); }
BoundarySet Sampler::boundary() { return sample_boundary(domain_, config_.boundary, boundary_); }
PointSet Sampler::initial() { return sample_initial(domain_, config_.initial, initial_); }
PointSet Sampler::periodic() { return sample_interior(domain_, config_.boundary, periodic_); }

}  // namespace mimres

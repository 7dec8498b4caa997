#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mimres/problems/problems.hpp"
#include "mimres/rng.hpp"

namespace mimres {

/// Independent random streams; consuming one never shifts another.
enum class StreamPurpose : std::uint64_t { Interior = 1, Boundary, Initial, Periodic, Evaluation, Init };

Rng make_stream(std::uint64_t seed, StreamPurpose purpose);

/// Row-major points, `dim` coordinates each.
struct PointSet {
  std::size_t dim = 0;
  std::vector<double> coords;

  std::size_t size() const { return dim == 0 ? 0 : coords.size() / dim; }
  std::span<const double> point(std::size_t i) const { return {coords.data() + i * dim, dim}; }
  std::span<double> point(std::size_t i) { return {coords.data() + i * dim, dim}; }
};

/// Boundary points with outward unit normals. Normals have the point layout,
/// with a zero time component when time is present.
struct BoundarySet {
  PointSet points;
  std::vector<double> normals;
  /// Face index per point: 2 * axis + (0 for the lower face, 1 for the upper).
  std::vector<std::size_t> faces;

  std::size_t size() const { return points.size(); }
  std::span<const double> normal(std::size_t i) const { return {normals.data() + i * points.dim, points.dim}; }
};

struct SamplerConfig {
  std::size_t interior = 1024;  // N
  std::size_t boundary = 256;   // M
  std::size_t initial = 256;    // M0
  std::uint64_t seed = 0;
};

/// i.i.d. uniform on the cube, times [0, T] when the domain has time.
PointSet sample_interior(const Domain& domain, std::size_t count, Rng& rng);
/// Face uniform among the 2d faces, remaining coordinates uniform.
BoundarySet sample_boundary(const Domain& domain, std::size_t count, Rng& rng);
/// Spatial points at t = 0.
PointSet sample_initial(const Domain& domain, std::size_t count, Rng& rng);

/// x + 2 pi e_axis; only defined on the torus.
std::vector<double> periodic_partner(const Domain& domain, std::span<const double> x, std::size_t axis);

/// Per-purpose streams for one run.
class Sampler {
 public:
  Sampler(const Domain& domain, const SamplerConfig& config);

  const SamplerConfig& config() const { return config_; }
  PointSet interior();
  BoundarySet boundary();
  PointSet initial();
  /// Anchor points for periodic penalties, drawn like interior points.
  PointSet periodic();

 private:
  Domain domain_;
  SamplerConfig config_;
  Rng interior_, boundary_, initial_, periodic_;
};

}  // namespace mimres

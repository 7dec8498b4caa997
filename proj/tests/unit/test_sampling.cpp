#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "mimres/sampling/sampling.hpp"

using namespace mimres;
using doctest::Approx;

TEST_CASE("interior points stay in the cube and are uniform") {
  const Domain dom = poisson_spec(3).domain();
  Rng rng = make_stream(1, StreamPurpose::Interior);
  const PointSet pts = sample_interior(dom, 100000, rng);
  std::array<double, 3> mean{};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t k = 0; k < 3; ++k) {
      const double c = pts.point(i)[k];
      REQUIRE(c >= 0.0);
      REQUIRE(c <= 1.0);
      mean[k] += c;
    }
  }
  for (double m : mean) CHECK(std::abs(m / 1e5 - 0.5) < 0.01);
}

TEST_CASE("streams are reproducible and independent") {
  const Domain dom = monge_ampere_spec(2).domain();
  Rng a = make_stream(3, StreamPurpose::Interior), b = make_stream(3, StreamPurpose::Interior);
  CHECK(sample_interior(dom, 50, a).coords == sample_interior(dom, 50, b).coords);

  Sampler s1(dom, {16, 8, 8, 42}), s2(dom, {16, 8, 8, 42});
  s1.boundary();  // drawing boundary points must not shift the interior stream
  CHECK(s1.interior().coords == s2.interior().coords);
  Sampler s3(dom, {16, 8, 8, 43});
  CHECK(s3.interior().coords != s2.interior().coords);
}

TEST_CASE("boundary points lie on faces with outward normals") {
  const Domain dom = poisson_spec(2).domain();
  Rng rng = make_stream(5, StreamPurpose::Boundary);
  const BoundarySet bd = sample_boundary(dom, 100000, rng);
  std::array<std::size_t, 4> hist{};
  for (std::size_t i = 0; i < bd.size(); ++i) {
    const auto x = bd.points.point(i);
    const std::size_t face = bd.faces[i];
    const std::size_t axis = face / 2;
    const double bound = face % 2 == 0 ? dom.lower() : dom.upper();
    REQUIRE(x[axis] == bound);
    const auto n = bd.normal(i);
    for (std::size_t k = 0; k < 2; ++k) {
      REQUIRE(n[k] == (k == axis ? (face % 2 == 0 ? -1.0 : 1.0) : 0.0));
    }
    ++hist[face];
  }
  for (std::size_t h : hist) CHECK(std::abs(static_cast<double>(h) / 1e5 - 0.25) < 0.01);
}

TEST_CASE("time-dependent sets") {
  const Domain dom = kdv_spec(2, 0.5).domain();
  Rng rng = make_stream(6, StreamPurpose::Boundary);
  const BoundarySet bd = sample_boundary(dom, 1000, rng);
  for (std::size_t i = 0; i < bd.size(); ++i) {
    const double t = bd.points.point(i)[2];
    REQUIRE(t >= 0.0);
    REQUIRE(t <= 0.5);
    REQUIRE(bd.normal(i)[2] == 0.0);
  }
  Rng rng0 = make_stream(6, StreamPurpose::Initial);
  const PointSet init = sample_initial(dom, 100, rng0);
  REQUIRE(init.dim == 3);
  for (std::size_t i = 0; i < init.size(); ++i) CHECK(init.point(i)[2] == 0.0);
}

TEST_CASE("periodic partners") {
  const Domain dom = kdv_spec(2).domain();
  const std::vector<double> origin{0.0, 0.0, 0.3};
  const auto p = periodic_partner(dom, origin, 0);
  CHECK(p[0] == Approx(2 * std::numbers::pi));
  CHECK(p[1] == 0.0);
  CHECK(p[2] == 0.3);
  CHECK(periodic_partner(dom, p, 0)[0] - origin[0] == Approx(4 * std::numbers::pi));

  const ProblemSpec kdv = kdv_spec(2);
  const std::vector<double> x{1.1, 4.0, 0.7};
  for (std::size_t axis = 0; axis < 2; ++axis) {
    CHECK(std::abs(kdv.exact(periodic_partner(dom, x, axis)) - kdv.exact(x)) < 1e-12);
  }
  CHECK_THROWS_AS(periodic_partner(poisson_spec(2).domain(), origin, 0), ConfigError);
}

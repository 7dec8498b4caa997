#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "mimres/autodiff/field.hpp"

namespace mimres {

using JetFunction = std::function<Jet(std::span<const Jet>)>;

/// Scalar jet function reading output `row` of a field.
JetFunction scalar_output(const Field& field, std::size_t row = 0);

/// (f, f', ..., f^(K)) of eps -> f(x + eps v), K <= 4.
std::vector<double> directional_derivs(const JetFunction& f, std::span<const double> x,
                                       std::span<const double> v, int order);

/// Sum of pure second derivatives over the first `spatial_dims` coordinates
/// (all coordinates when 0).
double laplacian(const JetFunction& f, std::span<const double> x, std::size_t spatial_dims = 0);

/// sum_i sum_j d^4 f / dx_i^2 dx_j^2 from one order-(2,2) jet per unordered
/// pair (i, j).
double bilaplacian(const JetFunction& f, std::span<const double> x, std::size_t spatial_dims = 0);

// Batched versions. `points` is row-major [batch][dim]. A direction is either
// empty (none), `dim` long (shared by all points) or batch*dim long.

std::vector<double> axis_direction(std::size_t dim, std::size_t axis);
std::vector<double> pair_direction(std::size_t dim, std::size_t axis_a, std::size_t axis_b);

JetTensor make_input(std::span<const double> points, std::size_t dim, JetShape shape,
                     std::span<const double> dir1 = {}, std::span<const double> dir2 = {});

NodeId record_pass(Tape& tape, const Field& field, std::span<const double> points, JetShape shape,
                   std::span<const double> dir1 = {}, std::span<const double> dir2 = {});
JetTensor evaluate_pass(const Field& field, std::span<const double> points, JetShape shape,
                        std::span<const double> dir1 = {}, std::span<const double> dir2 = {});

/// Laplacian of output `row`, recorded as a [1][order 0][batch] node.
NodeId record_laplacian(Tape& tape, const Field& field, std::span<const double> points,
                        std::size_t spatial_dims, std::size_t row = 0);
NodeId record_bilaplacian(Tape& tape, const Field& field, std::span<const double> points,
                          std::size_t spatial_dims, std::size_t row = 0);

}  // namespace mimres

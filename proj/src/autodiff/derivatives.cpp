#include "mimres/autodiff/derivatives.hpp"

#include <string>

namespace mimres {

JetFunction scalar_output(const Field& field, std::size_t row) {
  return [&field, row](std::span<const Jet> x) { return evaluate_point(field, x).at(row); };
}

std::vector<double> directional_derivs(const JetFunction& f, std::span<const double> x,
                                       std::span<const double> v, int order) {
  const JetShape shape = JetShape::univariate(order);
  if (v.size() != x.size()) throw ShapeError("direction and point differ in dimension");
  std::vector<Jet> in(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) in[i] = Jet::variable(x[i], v[i], 0.0, shape);
  const Jet y = f(in);
  std::vector<double> out(static_cast<std::size_t>(order) + 1);
  for (int k = 0; k <= order; ++k) out[static_cast<std::size_t>(k)] = y.derivative(k);
  return out;
}

double laplacian(const JetFunction& f, std::span<const double> x, std::size_t spatial_dims) {
  const std::size_t d = spatial_dims == 0 ? x.size() : spatial_dims;
  double sum = 0.0;
  for (std::size_t i = 0; i < d; ++i) sum += directional_derivs(f, x, axis_direction(x.size(), i), 2)[2];
  return sum;
}

double bilaplacian(const JetFunction& f, std::span<const double> x, std::size_t spatial_dims) {
  const std::size_t d = spatial_dims == 0 ? x.size() : spatial_dims;
  const JetShape shape = JetShape::bivariate(2, 2);
  double sum = 0.0;
  std::vector<Jet> in(x.size());
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      for (std::size_t k = 0; k < x.size(); ++k) {
        in[k] = Jet::variable(x[k], k == i ? 1.0 : 0.0, k == j ? 1.0 : 0.0, shape);
      }
      // Coefficient (2,2) is d^4 f / dx_i^2 dx_j^2 / 4, also when i == j.
      const double mixed = 4.0 * f(in)(2, 2);
      sum += (i == j ? 1.0 : 2.0) * mixed;
    }
  }
  return sum;
}

std::vector<double> axis_direction(std::size_t dim, std::size_t axis) {
  std::vector<double> v(dim, 0.0);
  v.at(axis) = 1.0;
  return v;
}

std::vector<double> pair_direction(std::size_t dim, std::size_t axis_a, std::size_t axis_b) {
  std::vector<double> v(dim, 0.0);
  v.at(axis_a) += 1.0;
  v.at(axis_b) += 1.0;
  return v;
}

namespace {

void fill_direction(JetTensor& t, std::span<const double> dir, std::size_t dim, std::size_t c) {
  if (dir.empty()) return;
  const std::size_t batch = t.batch();
  if (dir.size() == dim) {
    for (std::size_t i = 0; i < dim; ++i) {
      if (dir[i] == 0.0) continue;
      double* dst = t.coeff(i, c);
      for (std::size_t b = 0; b < batch; ++b) dst[b] = dir[i];
    }
  } else if (dir.size() == dim * batch) {
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t i = 0; i < dim; ++i) t.at(i, c, b) = dir[b * dim + i];
    }
  } else {
    throw ShapeError("direction length " + std::to_string(dir.size()) + " fits neither dim nor batch*dim");
  }
}

}  // namespace

JetTensor make_input(std::span<const double> points, std::size_t dim, JetShape shape,
                     std::span<const double> dir1, std::span<const double> dir2) {
  if (dim == 0 || points.size() % dim != 0) throw ShapeError("points are not a multiple of the dimension");
  const std::size_t batch = points.size() / dim;
  JetTensor t(dim, shape, batch);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t i = 0; i < dim; ++i) t.at(i, 0, b) = points[b * dim + i];
  }
  if (shape.first >= 1) fill_direction(t, dir1, dim, shape.index(1, 0));
  if (shape.second >= 1) fill_direction(t, dir2, dim, shape.index(0, 1));
  return t;
}

NodeId record_pass(Tape& tape, const Field& field, std::span<const double> points, JetShape shape,
                   std::span<const double> dir1, std::span<const double> dir2) {
  const NodeId in = tape.constant(make_input(points, field.input_dim(), shape, dir1, dir2));
  return field.record(tape, in);
}

JetTensor evaluate_pass(const Field& field, std::span<const double> points, JetShape shape,
                        std::span<const double> dir1, std::span<const double> dir2) {
  return field.evaluate(make_input(points, field.input_dim(), shape, dir1, dir2));
}

NodeId record_laplacian(Tape& tape, const Field& field, std::span<const double> points,
                        std::size_t spatial_dims, std::size_t row) {
  const std::size_t dim = field.input_dim();
  const JetShape shape = JetShape::univariate(2);
  NodeId sum{};
  for (std::size_t i = 0; i < spatial_dims; ++i) {
    const auto dir = axis_direction(dim, i);
    const NodeId out = record_pass(tape, field, points, shape, dir);
    const NodeId second = tape.scale(tape.coefficient(tape.slice_rows(out, row, 1), 2), 2.0);
    sum = i == 0 ? second : tape.add(sum, second);
  }
  return sum;
}

NodeId record_bilaplacian(Tape& tape, const Field& field, std::span<const double> points,
                          std::size_t spatial_dims, std::size_t row) {
  const std::size_t dim = field.input_dim();
  const JetShape shape = JetShape::bivariate(2, 2);
  NodeId sum{};
  bool first = true;
  for (std::size_t i = 0; i < spatial_dims; ++i) {
    for (std::size_t j = i; j < spatial_dims; ++j) {
      const auto di = axis_direction(dim, i);
      const auto dj = axis_direction(dim, j);
      const NodeId out = record_pass(tape, field, points, shape, di, dj);
      const NodeId term = tape.scale(tape.coefficient(tape.slice_rows(out, row, 1), 2, 2), i == j ? 4.0 : 8.0);
      sum = first ? term : tape.add(sum, term);
      first = false;
    }
  }
  return sum;
}

}  // namespace mimres

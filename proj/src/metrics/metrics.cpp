#include "mimres/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mimres/autodiff/derivatives.hpp"

namespace mimres {

QuantityMask quantities(ProblemKind problem) {
  QuantityMask m;
  if (problem == ProblemKind::Biharmonic) m.lap_u = m.grad_lap_u = true;
  if (problem == ProblemKind::KdV) m.diag_hess_u = true;
  return m;
}

EvalSet make_eval_set(const ProblemSpec& problem, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw ConfigError("eval_points must be positive");
  Rng rng = make_stream(seed, StreamPurpose::Evaluation);
  EvalSet e;
  e.points = sample_interior(problem.domain(), count, rng);
  e.dim = problem.dim();
  const QuantityMask mask = quantities(problem.kind());
  auto append = [](std::vector<double>& dst, const std::vector<double>& v) { dst.insert(dst.end(), v.begin(), v.end()); };
  for (std::size_t i = 0; i < count; ++i) {
    const auto x = e.points.point(i);
    e.u.push_back(problem.exact(x));
    append(e.grad_u, problem.exact_gradient(x));
    if (mask.lap_u) e.lap_u.push_back(problem.exact_laplacian(x));
    if (mask.grad_lap_u) append(e.grad_lap_u, problem.exact_grad_laplacian(x));
    if (mask.diag_hess_u) append(e.diag_hess_u, problem.exact_hessian_diag(x));
  }
  return e;
}

double relative_l2(std::span<const double> approx, std::span<const double> exact) {
  if (approx.size() != exact.size()) throw std::invalid_argument("relative_l2: size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    const double diff = approx[i] - exact[i];
    num += diff * diff;
    den += exact[i] * exact[i];
  }
  if (den == 0.0) throw std::domain_error("relative_l2: exact field has zero norm");
  return std::sqrt(num / den);
}

namespace {

struct Approx {
  std::vector<double> u, grad_u, lap_u, grad_lap_u, diag_hess_u;
};

void evaluate_chunk(const ProblemSpec& problem, const Field& field, const UnknownLayout& layout,
                    std::span<const double> points, Approx& out) {
  const std::size_t d = problem.dim();
  const std::size_t dim = field.input_dim();
  const std::size_t n = points.size() / dim;
  const QuantityMask mask = quantities(problem.kind());

  // Order-2 jets along each spatial axis give values, first and pure second
  // derivatives of every output row.
  std::vector<JetTensor> axis;
  for (std::size_t i = 0; i < d; ++i) {
    axis.push_back(evaluate_pass(field, points, JetShape::univariate(2), axis_direction(dim, i)));
  }
  auto c = [&](std::size_t i, std::size_t row, int k, std::size_t b) { return axis[i].at(row, k, b); };

  for (std::size_t b = 0; b < n; ++b) out.u.push_back(c(0, layout.u.begin, 0, b));

  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t i = 0; i < d; ++i) {
      out.grad_u.push_back(layout.p.present() ? c(0, layout.p.begin + i, 0, b) : c(i, layout.u.begin, 1, b));
    }
  }
  if (mask.lap_u) {
    for (std::size_t b = 0; b < n; ++b) {
      double lap = 0.0;
      if (layout.q.present()) {
        lap = c(0, layout.q.begin, 0, b);
      } else {
        for (std::size_t i = 0; i < d; ++i) lap += 2.0 * c(i, layout.u.begin, 2, b);
      }
      out.lap_u.push_back(lap);
    }
  }
  if (mask.grad_lap_u) {
    std::vector<double> g(n * d, 0.0);
    if (layout.w.present()) {
      for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t j = 0; j < d; ++j) g[b * d + j] = c(0, layout.w.begin + j, 0, b);
      }
    } else if (layout.q.present()) {
      for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t j = 0; j < d; ++j) g[b * d + j] = c(j, layout.q.begin, 1, b);
      }
    } else {
      // d/dx_j Lap u = sum_i d^3 u / dx_i^2 dx_j = sum_i 2 c_21 along (e_i, e_j).
      const JetShape shape = JetShape::bivariate(2, 1);
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
          const JetTensor t =
              evaluate_pass(field, points, shape, axis_direction(dim, i), axis_direction(dim, j));
          const std::size_t k = shape.index(2, 1);
          for (std::size_t b = 0; b < n; ++b) g[b * d + j] += 2.0 * t.at(layout.u.begin, k, b);
        }
      }
    }
    out.grad_lap_u.insert(out.grad_lap_u.end(), g.begin(), g.end());
  }
  if (mask.diag_hess_u) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t i = 0; i < d; ++i) {
        out.diag_hess_u.push_back(layout.q.present() ? c(0, layout.q.begin + i, 0, b)
                                                     : 2.0 * c(i, layout.u.begin, 2, b));
      }
    }
  }
}

}  // namespace

ErrorSet evaluate_all(const ProblemSpec& problem, const Field& unknowns, const UnknownLayout& layout,
                      const EvalSet& eval, std::size_t chunk) {
  if (unknowns.output_dim() != layout.total) throw ConfigError("field outputs do not match the unknown layout");
  if (chunk == 0) chunk = eval.points.size();
  Approx a;
  const std::size_t dim = eval.points.dim;
  for (std::size_t start = 0; start < eval.points.size(); start += chunk) {
    const std::size_t count = std::min(chunk, eval.points.size() - start);
    evaluate_chunk(problem, unknowns, layout, std::span<const double>(eval.points.coords).subspan(start * dim, count * dim),
                   a);
  }
  const QuantityMask mask = quantities(problem.kind());
  ErrorSet e;
  e.u = relative_l2(a.u, eval.u);
  e.grad_u = relative_l2(a.grad_u, eval.grad_u);
  if (mask.lap_u) e.lap_u = relative_l2(a.lap_u, eval.lap_u);
  if (mask.grad_lap_u) e.grad_lap_u = relative_l2(a.grad_lap_u, eval.grad_lap_u);
  if (mask.diag_hess_u) e.diag_hess_u = relative_l2(a.diag_hess_u, eval.diag_hess_u);
  return e;
}

std::string metric_sources(const ProblemSpec& problem, const UnknownLayout& layout) {
  const QuantityMask mask = quantities(problem.kind());
  std::string s = "u=output;grad_u=";
  s += layout.p.present() ? "p" : "jets(u)";
  if (mask.lap_u) s += std::string(";lap_u=") + (layout.q.present() ? "q" : "jets(u)");
  if (mask.grad_lap_u) {
    s += ";grad_lap_u=";
    s += layout.w.present() ? "w" : (layout.q.present() ? "jets(q)" : "jets(u)");
  }
  if (mask.diag_hess_u) s += std::string(";diag_hess_u=") + (layout.q.present() ? "q" : "jets(u)");
  return s;
}

}  // namespace mimres

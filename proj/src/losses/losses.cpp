#include "mimres/losses/losses.hpp"

#include <cmath>
#include <numbers>

#include "mimres/autodiff/derivatives.hpp"
#include "mimres/losses/determinant.hpp"

namespace mimres {

namespace {

constexpr double kPi = std::numbers::pi;

// Order-0 constant [rows][batch] from a row-major [batch][rows] table.
JetTensor order0_table(std::span<const double> values, std::size_t rows, std::size_t batch) {
  JetTensor t(rows, JetShape{}, batch);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t r = 0; r < rows; ++r) t.at(r, 0, b) = values[b * rows + r];
  }
  return t;
}

template <class Fn>
JetTensor per_point(const PointSet& points, Fn fn) {
  JetTensor t(1, JetShape{}, points.size());
  for (std::size_t b = 0; b < points.size(); ++b) t.at(0, 0, b) = fn(points.point(b));
  return t;
}

JetTensor negated(JetTensor t) {
  for (double& v : t.data()) v = -v;
  return t;
}

// Recording helpers over one field and point set.
class Recorder {
 public:
  Recorder(Tape& tape, const Field& field) : tape_(tape), field_(field) {}

  NodeId pass(const PointSet& points, int order, std::span<const double> dir = {}) {
    return record_pass(tape_, field_, points.coords, JetShape::univariate(order), dir);
  }
  NodeId axis_pass(const PointSet& points, int order, std::size_t axis) {
    return pass(points, order, axis_direction(points.dim, axis));
  }
  NodeId coeff(NodeId pass_node, std::size_t row, int k) {
    return tape_.coefficient(tape_.slice_rows(pass_node, row, 1), k);
  }
  NodeId minus_constant(NodeId a, const JetTensor& c) { return tape_.add_constant(a, negated(c)); }

  Tape& tape() { return tape_; }

 private:
  Tape& tape_;
  const Field& field_;
};

class TermList {
 public:
  explicit TermList(Tape& tape) : tape_(tape) {}

  void residual(std::string name, NodeId r, double measure, std::size_t count) {
    add(std::move(name), r, measure, count, 1.0, false);
  }
  void penalty(std::string name, NodeId r, double measure, std::size_t count, double lambda) {
    add(std::move(name), r, measure, count, lambda, true);
  }

  LossRecord finish(NeumannForm form) {
    LossRecord record;
    record.terms = std::move(terms_);
    record.neumann = form;
    NodeId total{};
    bool first = true;
    for (const LossTerm& t : record.terms) {
      const NodeId scaled = t.weight == 1.0 ? t.node : tape_.scale(t.node, t.weight);
      total = first ? scaled : tape_.add(total, scaled);
      first = false;
    }
    record.total = total;
    return record;
  }

 private:
  void add(std::string name, NodeId r, double measure, std::size_t count, double weight, bool penalty) {
    const NodeId node = tape_.squared_norm(r, measure / static_cast<double>(count));
    terms_.push_back({std::move(name), node, weight, penalty});
  }

  Tape& tape_;
  std::vector<LossTerm> terms_;
};

NodeId sum_nodes(Tape& tape, const std::vector<NodeId>& nodes) {
  NodeId s = nodes.at(0);
  for (std::size_t i = 1; i < nodes.size(); ++i) s = tape.add(s, nodes[i]);
  return s;
}

// Normal component of rows [begin, begin + count) of an order-0 pass.
NodeId flux(Tape& tape, NodeId pass_node, GroupRange group, const BoundarySet& boundary, std::size_t dim) {
  std::vector<double> normals(boundary.size() * dim);
  for (std::size_t b = 0; b < boundary.size(); ++b) {
    for (std::size_t k = 0; k < dim; ++k) normals[b * dim + k] = boundary.normal(b)[k];
  }
  const NodeId n = tape.constant(order0_table(normals, dim, boundary.size()));
  const NodeId p = tape.coefficient(tape.slice_rows(pass_node, group.begin, group.count), 0);
  return tape.sum_rows(tape.mul(p, n));
}

void require(const GroupRange& g, std::size_t count, const char* name) {
  if (g.count != count) throw ConfigError(std::string("loss needs unknown group ") + name);
}

// KdV points x + 2 pi e_k for every anchor and axis, alongside the anchors
// repeated in the same order.
std::pair<PointSet, PointSet> periodic_pairs(const Domain& domain, const PointSet& anchors) {
  PointSet repeated{anchors.dim, {}};
  PointSet partners{anchors.dim, {}};
  for (std::size_t k = 0; k < domain.dim; ++k) {
    for (std::size_t i = 0; i < anchors.size(); ++i) {
      const auto x = anchors.point(i);
      repeated.coords.insert(repeated.coords.end(), x.begin(), x.end());
      const auto y = periodic_partner(domain, x, k);
      partners.coords.insert(partners.coords.end(), y.begin(), y.end());
    }
  }
  return {std::move(repeated), std::move(partners)};
}

void kdv_penalties(Recorder& rec, TermList& terms, const ProblemSpec& problem, const LossBatch& batch,
                   const PenaltyWeights& w) {
  const NodeId init = rec.coeff(rec.pass(batch.initial, 0), 0, 0);
  terms.penalty("initial", rec.minus_constant(init, per_point(batch.initial, [&](auto x) { return problem.initial_value(x); })),
                batch.initial_measure, batch.initial.size(), w.lambda1);
  const NodeId trace = rec.coeff(rec.pass(batch.boundary.points, 0), 0, 0);
  terms.penalty("dirichlet",
                rec.minus_constant(trace, per_point(batch.boundary.points, [&](auto x) { return problem.boundary_value(x); })),
                batch.boundary_measure, batch.boundary.size(), w.lambda1);
}

LossRecord dgm_poisson(Recorder& rec, TermList& terms, const ProblemSpec& problem, const LossBatch& batch,
                       const PenaltyWeights& w) {
  Tape& tape = rec.tape();
  const std::size_t d = problem.dim();
  std::vector<NodeId> second;
  NodeId u{};
  for (std::size_t i = 0; i < d; ++i) {
    const NodeId p = rec.axis_pass(batch.interior, 2, i);
    if (i == 0) u = rec.coeff(p, 0, 0);
    second.push_back(rec.coeff(p, 0, 2));
  }
  const NodeId lap = tape.scale(sum_nodes(tape, second), 2.0);
  const NodeId lhs = tape.sub(tape.scale(u, kPi * kPi), lap);
  terms.residual("pde", rec.minus_constant(lhs, per_point(batch.interior, [&](auto x) { return problem.forcing(x); })),
                 batch.interior_measure, batch.interior.size());
  const NodeId b = rec.pass(batch.boundary.points, 1, batch.boundary.normals);
  terms.penalty("neumann", rec.coeff(b, 0, 1), batch.boundary_measure, batch.boundary.size(), w.lambda1);
  return terms.finish(NeumannForm::Derivative);
}

// Hessian entries H_ij, with off-diagonals by polarization.
std::vector<NodeId> dgm_hessian(Recorder& rec, const PointSet& points, std::size_t d, NodeId* value) {
  Tape& tape = rec.tape();
  std::vector<NodeId> h(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    const NodeId p = rec.axis_pass(points, 2, i);
    if (i == 0 && value != nullptr) *value = rec.coeff(p, 0, 0);
    h[i * d + i] = tape.scale(rec.coeff(p, 0, 2), 2.0);
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const NodeId p = rec.pass(points, 2, pair_direction(points.dim, i, j));
      const NodeId sum = tape.scale(rec.coeff(p, 0, 2), 2.0);
      h[i * d + j] = tape.scale(tape.sub(sum, tape.add(h[i * d + i], h[j * d + j])), 0.5);
      h[j * d + i] = h[i * d + j];
    }
  }
  return h;
}

LossRecord dgm_monge_ampere(Recorder& rec, TermList& terms, const ProblemSpec& problem, const LossBatch& batch,
                            const PenaltyWeights& w) {
  const std::size_t d = problem.dim();
  const std::vector<NodeId> h = dgm_hessian(rec, batch.interior, d, nullptr);
  const NodeId det = determinant(h, d, TapeOps{rec.tape()});
  terms.residual("pde", rec.minus_constant(det, per_point(batch.interior, [&](auto x) { return problem.forcing(x); })),
                 batch.interior_measure, batch.interior.size());
  const NodeId ub = rec.coeff(rec.pass(batch.boundary.points, 0), 0, 0);
  terms.penalty("dirichlet",
                rec.minus_constant(ub, per_point(batch.boundary.points, [&](auto x) { return problem.boundary_value(x); })),
                batch.boundary_measure, batch.boundary.size(), w.lambda1);
  return terms.finish(NeumannForm::None);
}

LossRecord dgm_biharmonic(Recorder& rec, TermList& terms, const ProblemSpec& problem, const Field& field,
                          const LossBatch& batch, const PenaltyWeights& w) {
  const NodeId bilap = record_bilaplacian(rec.tape(), field, batch.interior.coords, problem.dim(), 0);
  terms.residual("pde", rec.minus_constant(bilap, per_point(batch.interior, [&](auto x) { return problem.forcing(x); })),
                 batch.interior_measure, batch.interior.size());
  const NodeId b = rec.pass(batch.boundary.points, 1, batch.boundary.normals);
  terms.penalty("dirichlet",
                rec.minus_constant(rec.coeff(b, 0, 0),
                                   per_point(batch.boundary.points, [&](auto x) { return problem.boundary_value(x); })),
                batch.boundary_measure, batch.boundary.size(), w.lambda1);
  terms.penalty("neumann", rec.coeff(b, 0, 1), batch.boundary_measure, batch.boundary.size(), w.lambda2);
  return terms.finish(NeumannForm::Derivative);
}

LossRecord dgm_kdv(Recorder& rec, TermList& terms, const ProblemSpec& problem, const LossBatch& batch,
                   const PenaltyWeights& w) {
  Tape& tape = rec.tape();
  const std::size_t d = problem.dim();
  std::vector<NodeId> parts;
  parts.push_back(rec.coeff(rec.axis_pass(batch.interior, 1, d), 0, 1));
  for (std::size_t i = 0; i < d; ++i) parts.push_back(tape.scale(rec.coeff(rec.axis_pass(batch.interior, 3, i), 0, 3), 6.0));
  terms.residual("pde", rec.minus_constant(sum_nodes(tape, parts), per_point(batch.interior, [&](auto x) { return problem.forcing(x); })),
                 batch.interior_measure, batch.interior.size());
  kdv_penalties(rec, terms, problem, batch, w);

  const auto [anchors, partners] = periodic_pairs(problem.domain(), batch.periodic);
  std::vector<NodeId> du;
  NodeId ua{}, ub{};
  for (std::size_t j = 0; j < d; ++j) {
    const NodeId a = rec.axis_pass(anchors, 1, j);
    const NodeId b = rec.axis_pass(partners, 1, j);
    if (j == 0) {
      ua = rec.coeff(a, 0, 0);
      ub = rec.coeff(b, 0, 0);
    }
    du.push_back(tape.sub(rec.coeff(a, 0, 1), rec.coeff(b, 0, 1)));
  }
  terms.penalty("periodic_u", tape.sub(ua, ub), batch.periodic_measure, batch.periodic.size(), w.lambda2);
  terms.penalty("periodic_grad_u", tape.concat_rows(du), batch.periodic_measure, batch.periodic.size(), w.lambda3);
  return terms.finish(NeumannForm::None);
}

// First-order passes along every spatial axis, shared by the MIM losses.
struct AxisPasses {
  std::vector<NodeId> pass;
  NodeId value(Recorder& rec, std::size_t row) const { return rec.coeff(pass[0], row, 0); }
  NodeId deriv(Recorder& rec, std::size_t axis, std::size_t row) const { return rec.coeff(pass[axis], row, 1); }
};

AxisPasses axis_passes(Recorder& rec, const PointSet& points, std::size_t d, int order) {
  AxisPasses a;
  for (std::size_t i = 0; i < d; ++i) a.pass.push_back(rec.axis_pass(points, order, i));
  return a;
}

// p_i - du/dx_i over all i, as one residual.
NodeId grad_residual(Recorder& rec, const AxisPasses& a, GroupRange p, std::size_t d) {
  std::vector<NodeId> rows;
  for (std::size_t i = 0; i < d; ++i) {
    rows.push_back(rec.tape().sub(a.value(rec, p.begin + i), a.deriv(rec, i, 0)));
  }
  return rec.tape().concat_rows(rows);
}

NodeId divergence(Recorder& rec, const AxisPasses& a, GroupRange g, std::size_t d) {
  std::vector<NodeId> parts;
  for (std::size_t i = 0; i < d; ++i) parts.push_back(a.deriv(rec, i, g.begin + i));
  return sum_nodes(rec.tape(), parts);
}

LossRecord mim_poisson(Recorder& rec, TermList& terms, const ProblemSpec& problem, const UnknownLayout& layout,
                       const LossBatch& batch, const PenaltyWeights& w, bool neumann_exact) {
  Tape& tape = rec.tape();
  const std::size_t d = problem.dim();
  require(layout.p, d, "p");
  const AxisPasses a = axis_passes(rec, batch.interior, d, 1);
  terms.residual("p-grad_u", grad_residual(rec, a, layout.p, d), batch.interior_measure, batch.interior.size());
  const NodeId lhs = tape.sub(tape.scale(a.value(rec, 0), kPi * kPi), divergence(rec, a, layout.p, d));
  terms.residual("pde", rec.minus_constant(lhs, per_point(batch.interior, [&](auto x) { return problem.forcing(x); })),
                 batch.interior_measure, batch.interior.size());
  if (neumann_exact) return terms.finish(NeumannForm::Multiplier);
  const NodeId b = rec.pass(batch.boundary.points, 0);
  terms.penalty("neumann", flux(tape, b, layout.p, batch.boundary, d), batch.boundary_measure, batch.boundary.size(),
                w.lambda1);
  return terms.finish(NeumannForm::Flux);
}

LossRecord mim_monge_ampere(Recorder& rec, TermList& terms, const ProblemSpec& problem, const UnknownLayout& layout,
                            const LossBatch& batch, const PenaltyWeights& w) {
  const std::size_t d = problem.dim();
  require(layout.p, d, "p");
  const AxisPasses a = axis_passes(rec, batch.interior, d, 1);
  terms.residual("p-grad_u", grad_residual(rec, a, layout.p, d), batch.interior_measure, batch.interior.size());
  std::vector<NodeId> jac(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) jac[i * d + j] = a.deriv(rec, j, layout.p.begin + i);
  }
  const NodeId det = determinant(jac, d, TapeOps{rec.tape()});
  terms.residual("pde", rec.minus_constant(det, per_point(batch.interior, [&](auto x) { return problem.forcing(x); })),
                 batch.interior_measure, batch.interior.size());
  const NodeId ub = rec.coeff(rec.pass(batch.boundary.points, 0), 0, 0);
  terms.penalty("dirichlet",
                rec.minus_constant(ub, per_point(batch.boundary.points, [&](auto x) { return problem.boundary_value(x); })),
                batch.boundary_measure, batch.boundary.size(), w.lambda1);
  return terms.finish(NeumannForm::None);
}

LossRecord mim_biharmonic(Recorder& rec, TermList& terms, const ProblemSpec& problem, const UnknownLayout& layout,
                          const LossBatch& batch, const PenaltyWeights& w) {
  Tape& tape = rec.tape();
  const std::size_t d = problem.dim();
  require(layout.q, 1, "q");
  const JetTensor f = per_point(batch.interior, [&](auto x) { return problem.forcing(x); });
  const JetTensor g = per_point(batch.boundary.points, [&](auto x) { return problem.boundary_value(x); });
  const std::size_t q = layout.q.begin;

  if (layout.p.present()) {
    require(layout.p, d, "p");
    require(layout.w, d, "w");
    const AxisPasses a = axis_passes(rec, batch.interior, d, 1);
    terms.residual("p-grad_u", grad_residual(rec, a, layout.p, d), batch.interior_measure, batch.interior.size());
    terms.residual("q-div_p", tape.sub(a.value(rec, q), divergence(rec, a, layout.p, d)), batch.interior_measure,
                   batch.interior.size());
    std::vector<NodeId> rows;
    for (std::size_t i = 0; i < d; ++i) rows.push_back(tape.sub(a.value(rec, layout.w.begin + i), a.deriv(rec, i, q)));
    terms.residual("w-grad_q", tape.concat_rows(rows), batch.interior_measure, batch.interior.size());
    terms.residual("div_w-f", rec.minus_constant(divergence(rec, a, layout.w, d), f), batch.interior_measure,
                   batch.interior.size());
    const NodeId b = rec.pass(batch.boundary.points, 0);
    terms.penalty("dirichlet", rec.minus_constant(rec.coeff(b, 0, 0), g), batch.boundary_measure, batch.boundary.size(),
                  w.lambda1);
    terms.penalty("neumann", flux(tape, b, layout.p, batch.boundary, d), batch.boundary_measure, batch.boundary.size(),
                  w.lambda2);
    return terms.finish(NeumannForm::Flux);
  }

  std::vector<NodeId> lap_u, lap_q;
  for (std::size_t i = 0; i < d; ++i) {
    const NodeId p = rec.axis_pass(batch.interior, 2, i);
    lap_u.push_back(rec.coeff(p, 0, 2));
    lap_q.push_back(rec.coeff(p, q, 2));
  }
  const AxisPasses a{{rec.axis_pass(batch.interior, 0, 0)}};
  terms.residual("q-lap_u", tape.sub(a.value(rec, q), tape.scale(sum_nodes(tape, lap_u), 2.0)), batch.interior_measure,
                 batch.interior.size());
  terms.residual("lap_q-f", rec.minus_constant(tape.scale(sum_nodes(tape, lap_q), 2.0), f), batch.interior_measure,
                 batch.interior.size());
  const NodeId b = rec.pass(batch.boundary.points, 1, batch.boundary.normals);
  terms.penalty("dirichlet", rec.minus_constant(rec.coeff(b, 0, 0), g), batch.boundary_measure, batch.boundary.size(),
                w.lambda1);
  terms.penalty("neumann", rec.coeff(b, 0, 1), batch.boundary_measure, batch.boundary.size(), w.lambda2);
  return terms.finish(NeumannForm::Derivative);
}

LossRecord mim_kdv(Recorder& rec, TermList& terms, const ProblemSpec& problem, const UnknownLayout& layout,
                   const LossBatch& batch, const PenaltyWeights& w) {
  Tape& tape = rec.tape();
  const std::size_t d = problem.dim();
  require(layout.p, d, "p");
  require(layout.q, d, "q");
  const AxisPasses a = axis_passes(rec, batch.interior, d, 1);
  terms.residual("p-grad_u", grad_residual(rec, a, layout.p, d), batch.interior_measure, batch.interior.size());
  std::vector<NodeId> rows;
  for (std::size_t i = 0; i < d; ++i) {
    rows.push_back(tape.sub(a.value(rec, layout.q.begin + i), a.deriv(rec, i, layout.p.begin + i)));
  }
  terms.residual("q-diag_grad_p", tape.concat_rows(rows), batch.interior_measure, batch.interior.size());
  const NodeId u_t = rec.coeff(rec.axis_pass(batch.interior, 1, d), 0, 1);
  terms.residual("pde",
                 rec.minus_constant(tape.add(u_t, divergence(rec, a, layout.q, d)),
                                    per_point(batch.interior, [&](auto x) { return problem.forcing(x); })),
                 batch.interior_measure, batch.interior.size());
  kdv_penalties(rec, terms, problem, batch, w);

  const auto [anchors, partners] = periodic_pairs(problem.domain(), batch.periodic);
  const NodeId pa = rec.pass(anchors, 0);
  const NodeId pb = rec.pass(partners, 0);
  terms.penalty("periodic_u", tape.sub(rec.coeff(pa, 0, 0), rec.coeff(pb, 0, 0)), batch.periodic_measure,
                batch.periodic.size(), w.lambda2);
  const NodeId p_a = tape.coefficient(tape.slice_rows(pa, layout.p.begin, d), 0);
  const NodeId p_b = tape.coefficient(tape.slice_rows(pb, layout.p.begin, d), 0);
  terms.penalty("periodic_p", tape.sub(p_a, p_b), batch.periodic_measure, batch.periodic.size(), w.lambda3);
  return terms.finish(NeumannForm::None);
}

}  // namespace

LossBatch draw_batch(const ProblemSpec& problem, Sampler& sampler) {
  const Domain& domain = problem.domain();
  LossBatch batch;
  batch.interior = sampler.interior();
  batch.boundary = sampler.boundary();
  batch.interior_measure = domain.interior_measure();
  batch.boundary_measure = domain.boundary_measure();
  if (domain.has_time()) {
    batch.initial = sampler.initial();
    batch.periodic = sampler.periodic();
    batch.initial_measure = domain.volume();
    batch.periodic_measure = domain.interior_measure();
  }
  return batch;
}

std::string_view to_string(NeumannForm form) {
  switch (form) {
    case NeumannForm::None:
      return "none";
    case NeumannForm::Derivative:
      return "derivative";
    case NeumannForm::Flux:
      return "flux";
    case NeumannForm::Multiplier:
      return "multiplier";
  }
  return "none";
}

const LossTerm* LossRecord::find(std::string_view name) const {
  for (const LossTerm& t : terms) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

std::size_t LossRecord::residual_count() const {
  std::size_t n = 0;
  for (const LossTerm& t : terms) n += t.penalty ? 0 : 1;
  return n;
}

std::size_t LossRecord::penalty_count() const { return terms.size() - residual_count(); }

LossRecord dgm_loss(Tape& tape, const ProblemSpec& problem, const Field& u, const LossBatch& batch,
                    const PenaltyWeights& weights) {
  if (u.output_dim() != 1) throw ConfigError("dgm loss needs a scalar field");
  if (u.input_dim() != problem.domain().point_dim()) throw ConfigError("field input does not match the domain");
  Recorder rec(tape, u);
  TermList terms(tape);
  switch (problem.kind()) {
    case ProblemKind::Poisson:
      return dgm_poisson(rec, terms, problem, batch, weights);
    case ProblemKind::MongeAmpere:
      return dgm_monge_ampere(rec, terms, problem, batch, weights);
    case ProblemKind::Biharmonic:
      return dgm_biharmonic(rec, terms, problem, u, batch, weights);
    case ProblemKind::KdV:
      return dgm_kdv(rec, terms, problem, batch, weights);
  }
  throw ConfigError("unknown problem");
}

LossRecord mim_loss(Tape& tape, const ProblemSpec& problem, const Field& unknowns, const UnknownLayout& layout,
                    const LossBatch& batch, const PenaltyWeights& weights, bool neumann_exact) {
  if (unknowns.output_dim() != layout.total) throw ConfigError("field outputs do not match the unknown layout");
  if (unknowns.input_dim() != problem.domain().point_dim()) throw ConfigError("field input does not match the domain");
  if (neumann_exact && problem.kind() != ProblemKind::Poisson) {
    throw ConfigError("the Neumann multiplier only applies to the Poisson problem");
  }
  Recorder rec(tape, unknowns);
  TermList terms(tape);
  switch (problem.kind()) {
    case ProblemKind::Poisson:
      return mim_poisson(rec, terms, problem, layout, batch, weights, neumann_exact);
    case ProblemKind::MongeAmpere:
      return mim_monge_ampere(rec, terms, problem, layout, batch, weights);
    case ProblemKind::Biharmonic:
      return mim_biharmonic(rec, terms, problem, layout, batch, weights);
    case ProblemKind::KdV:
      return mim_kdv(rec, terms, problem, layout, batch, weights);
  }
  throw ConfigError("unknown problem");
}

LossRecord build_loss(Tape& tape, const ProblemSpec& problem, MethodKind method, const Field& unknowns,
                      const UnknownLayout& layout, const LossBatch& batch, const PenaltyWeights& weights,
                      bool neumann_exact) {
  if (method == MethodKind::DGM) return dgm_loss(tape, problem, unknowns, batch, weights);
  return mim_loss(tape, problem, unknowns, layout, batch, weights, neumann_exact);
}

Jet neumann_multiplier(const Jet& x) { return x - x * x; }

std::vector<Jet> neumann_multiplier_wrap(std::span<const Jet> raw_p, std::span<const Jet> x) {
  if (x.size() < raw_p.size()) throw ShapeError("multiplier needs one coordinate per p component");
  std::vector<Jet> p(raw_p.size());
  for (std::size_t i = 0; i < raw_p.size(); ++i) p[i] = neumann_multiplier(x[i]) * raw_p[i];
  return p;
}

NeumannMultiplierField::NeumannMultiplierField(const Field& inner, GroupRange p) : inner_(inner), p_(p) {
  if (p.begin + p.count > inner.output_dim() || p.count > inner.input_dim()) {
    throw ShapeError("multiplier rows do not fit the field");
  }
}

JetTensor NeumannMultiplierField::multipliers(const JetTensor& input) const {
  JetTensor m(p_.count, input.shape(), input.batch());
  for (std::size_t i = 0; i < p_.count; ++i) {
    for (std::size_t b = 0; b < input.batch(); ++b) m.set_jet(i, b, neumann_multiplier(input.jet(i, b)));
  }
  return m;
}

JetTensor NeumannMultiplierField::evaluate(const JetTensor& input) const {
  JetTensor out = inner_.evaluate(input);
  const JetTensor m = multipliers(input);
  for (std::size_t i = 0; i < p_.count; ++i) {
    for (std::size_t b = 0; b < input.batch(); ++b) {
      out.set_jet(p_.begin + i, b, m.jet(i, b) * out.jet(p_.begin + i, b));
    }
  }
  return out;
}

NodeId NeumannMultiplierField::record(Tape& tape, NodeId input) const {
  const NodeId raw = inner_.record(tape, input);
  const NodeId m = tape.constant(multipliers(tape.value(input)));
  std::vector<NodeId> parts;
  const std::size_t rows = inner_.output_dim();
  if (p_.begin > 0) parts.push_back(tape.slice_rows(raw, 0, p_.begin));
  parts.push_back(tape.mul(tape.slice_rows(raw, p_.begin, p_.count), m));
  const std::size_t end = p_.begin + p_.count;
  if (end < rows) parts.push_back(tape.slice_rows(raw, end, rows - end));
  return tape.concat_rows(parts);
}

std::optional<std::string> derivative_order_warning(ProblemKind problem, MethodKind method, VariantKind variant,
                                                    ActivationKind activation) {
  int needed = 1;
  if (method == MethodKind::DGM) {
    switch (problem) {
      case ProblemKind::Poisson:
      case ProblemKind::MongeAmpere:
        needed = 2;
        break;
      case ProblemKind::Biharmonic:
        needed = 4;
        break;
      case ProblemKind::KdV:
        needed = 3;
        break;
    }
  } else if (problem == ProblemKind::Biharmonic && variant == VariantKind::Partial) {
    needed = 2;
  }
  // Lowest derivative order that vanishes identically away from the kink.
  int vanishing = 0;
  switch (activation) {
    case ActivationKind::Square:
      return std::nullopt;
    case ActivationKind::ReLU:
      vanishing = 2;
      break;
    case ActivationKind::ReQU:
      vanishing = 3;
      break;
    case ActivationKind::ReCU:
      vanishing = 4;
      break;
  }
  if (needed < vanishing) return std::nullopt;
  return std::string(to_string(activation)) + " has identically zero derivatives of order " +
         std::to_string(vanishing) + " and above, but " + std::string(to_string(method)) + " on " +
         std::string(to_string(problem)) + " needs order " + std::to_string(needed) +
         "; the corresponding loss terms cannot be fit";
}

}  // namespace mimres

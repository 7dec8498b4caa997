#include "mimres/autodiff/tape.hpp"

#include <algorithm>
#include <string>

#include "mimres/autodiff/kernels.hpp"

namespace mimres {

ParamSlot Tape::bind(std::span<const double> params) {
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (slot_data_[i] == params.data() && slots_[i].size == params.size()) return slots_[i];
  }
  ParamSlot slot{parameter_count_, params.size(), static_cast<std::uint32_t>(slots_.size())};
  slots_.push_back(slot);
  slot_data_.push_back(params.data());
  parameter_count_ += params.size();
  return slot;
}

NodeId Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return NodeId{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

const Tape::Node& Tape::node(NodeId id) const {
  if (id.index >= nodes_.size()) throw BindingError("node " + std::to_string(id.index) + " is not on this tape");
  return nodes_[id.index];
}

const JetTensor& Tape::value(NodeId id) const { return node(id).value; }

double Tape::scalar(NodeId id) const {
  const JetTensor& v = value(id);
  if (v.size() != 1) throw ShapeError("scalar(): node holds " + std::to_string(v.size()) + " values");
  return v.data()[0];
}

void Tape::clear() {
  nodes_.clear();
  slots_.clear();
  slot_data_.clear();
  parameter_count_ = 0;
}

NodeId Tape::constant(JetTensor value) {
  Node n{Op::Constant, {}, std::move(value), {}};
  return push(std::move(n));
}

NodeId Tape::parameters(ParamSlot slot, std::size_t offset, std::size_t count) {
  if (slot.id >= slots_.size() || slots_[slot.id].offset != slot.offset || slots_[slot.id].size != slot.size) {
    throw BindingError("parameter slot is not bound to this tape");
  }
  if (offset + count > slot.size) throw BindingError("parameter range exceeds the bound vector");
  JetTensor v(count, JetShape{}, 1);
  std::copy_n(slot_data_[slot.id] + offset, count, v.data().begin());
  Node n{Op::Parameters, {}, std::move(v), {}};
  n.a = slot.offset + offset;
  return push(std::move(n));
}

NodeId Tape::affine(NodeId x, NodeId weights, NodeId bias) {
  const JetTensor& xv = value(x);
  const JetTensor& wv = value(weights);
  const JetTensor& bv = value(bias);
  if (wv.batch() != 1 || wv.coeffs() != 1 || bv.batch() != 1 || bv.coeffs() != 1) {
    throw ShapeError("affine: weights and bias must be order-0 parameter leaves");
  }
  const std::size_t out_rows = bv.rows();
  Node n{Op::Affine, {x.index, weights.index, bias.index}, affine_forward(wv.data(), bv.data(), xv, out_rows), {}};
  return push(std::move(n));
}

NodeId Tape::activation(NodeId x, ActivationKind kind) {
  Node n{Op::Activation, {x.index}, {}, {}};
  n.value = activation_forward(kind, value(x), &n.aux);
  return push(std::move(n));
}

NodeId Tape::fold_rows(NodeId x, std::size_t out_rows) {
  Node n{Op::FoldRows, {x.index}, mimres::fold_rows(value(x), out_rows), {}};
  return push(std::move(n));
}

NodeId Tape::add(NodeId a, NodeId b) {
  JetTensor v = value(a);
  add_into(v, value(b), 1.0);
  return push(Node{Op::Add, {a.index, b.index}, std::move(v), {}});
}

NodeId Tape::sub(NodeId a, NodeId b) {
  JetTensor v = value(a);
  add_into(v, value(b), -1.0);
  return push(Node{Op::Sub, {a.index, b.index}, std::move(v), {}});
}

NodeId Tape::mul(NodeId a, NodeId b) {
  return push(Node{Op::Mul, {a.index, b.index}, jet_product(value(a), value(b)), {}});
}

NodeId Tape::scale(NodeId a, double s) {
  JetTensor v = value(a);
  for (double& x : v.data()) x *= s;
  Node n{Op::Scale, {a.index}, std::move(v), {}};
  n.s = s;
  return push(std::move(n));
}

NodeId Tape::add_constant(NodeId a, const JetTensor& c) {
  JetTensor v = value(a);
  add_into(v, c, 1.0);
  return push(Node{Op::AddConstant, {a.index}, std::move(v), {}});
}

NodeId Tape::slice_rows(NodeId a, std::size_t begin, std::size_t count) {
  const JetTensor& av = value(a);
  if (begin + count > av.rows()) throw ShapeError("slice_rows: range exceeds rows");
  JetTensor v(count, av.shape(), av.batch());
  std::copy_n(av.row(begin), count * av.row_length(), v.data().begin());
  Node n{Op::SliceRows, {a.index}, std::move(v), {}};
  n.a = begin;
  return push(std::move(n));
}

NodeId Tape::concat_rows(std::span<const NodeId> parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no parts");
  const JetTensor& first = value(parts[0]);
  std::size_t rows = 0;
  std::vector<std::uint32_t> parents;
  for (NodeId p : parts) {
    const JetTensor& pv = value(p);
    if (!(pv.shape() == first.shape()) || pv.batch() != first.batch()) {
      throw ShapeError("concat_rows: parts differ in jet shape or batch");
    }
    rows += pv.rows();
    parents.push_back(p.index);
  }
  JetTensor v(rows, first.shape(), first.batch());
  double* dst = v.data().data();
  for (NodeId p : parts) {
    const JetTensor& pv = value(p);
    dst = std::copy(pv.data().begin(), pv.data().end(), dst);
  }
  return push(Node{Op::ConcatRows, std::move(parents), std::move(v), {}});
}

NodeId Tape::sum_rows(NodeId a) {
  const JetTensor& av = value(a);
  JetTensor v(1, av.shape(), av.batch());
  for (std::size_t r = 0; r < av.rows(); ++r) kernels::active().axpy(1.0, av.row(r), v.row(0), av.row_length());
  return push(Node{Op::SumRows, {a.index}, std::move(v), {}});
}

NodeId Tape::coefficient(NodeId a, int i, int j) {
  const JetTensor& av = value(a);
  if (i > av.shape().first || j > av.shape().second || i < 0 || j < 0) {
    throw ShapeError("coefficient index outside the jet orders");
  }
  const std::size_t c = av.shape().index(i, j);
  JetTensor v(av.rows(), JetShape{}, av.batch());
  for (std::size_t r = 0; r < av.rows(); ++r) std::copy_n(av.coeff(r, c), av.batch(), v.row(r));
  Node n{Op::Coefficient, {a.index}, std::move(v), {}};
  n.a = c;
  return push(std::move(n));
}

NodeId Tape::squared_norm(NodeId a, double weight) {
  const JetTensor& av = value(a);
  if (av.coeffs() != 1) throw ShapeError("squared_norm expects an order-0 tensor");
  const double total = weight * kernels::active().dot(av.data().data(), av.data().data(), av.size());
  Node n{Op::SquaredNorm, {a.index}, JetTensor::scalar(total), {}};
  n.s = weight;
  return push(std::move(n));
}

Adjoint Tape::backward(NodeId root) const {
  const Node& rn = node(root);
  if (rn.value.size() != 1) throw ShapeError("backward needs a one-element root");

  Adjoint out;
  out.gradient.assign(parameter_count_, 0.0);
  std::vector<JetTensor> adj(root.index + 1);
  std::vector<bool> live(root.index + 1, false);
  adj[root.index] = JetTensor(1, rn.value.shape(), 1);
  adj[root.index].data()[0] = 1.0;
  live[root.index] = true;

  auto grad_of = [&](std::uint32_t p) -> JetTensor& {
    if (!live[p]) {
      const JetTensor& v = nodes_[p].value;
      adj[p] = JetTensor(v.rows(), v.shape(), v.batch());
      live[p] = true;
    }
    return adj[p];
  };

  const auto& k = kernels::active();
  for (std::uint32_t idx = root.index + 1; idx-- > 0;) {
    if (!live[idx]) continue;
    const Node& n = nodes_[idx];
    const JetTensor& g = adj[idx];
    switch (n.op) {
      case Op::Constant:
        break;
      case Op::Parameters:
        for (std::size_t r = 0; r < g.rows(); ++r) out.gradient[n.a + r] += g.data()[r];
        break;
      case Op::Affine: {
        const JetTensor& x = nodes_[n.parents[0]].value;
        const JetTensor& w = nodes_[n.parents[1]].value;
        const std::size_t rows = g.rows();
        const std::size_t cols = x.rows();
        const std::size_t len = x.row_length();
        k.gemm_tn(w.data().data(), rows, cols, g.row(0), grad_of(n.parents[0]).row(0), len);
        k.gemm_nt(g.row(0), rows, x.row(0), cols, grad_of(n.parents[1]).data().data(), len);
        JetTensor& gb = grad_of(n.parents[2]);
        for (std::size_t i = 0; i < rows; ++i) {
          const double* gi = g.coeff(i, 0);
          double s = 0.0;
          for (std::size_t b = 0; b < g.batch(); ++b) s += gi[b];
          gb.data()[i] += s;
        }
        break;
      }
      case Op::Activation:
      case Op::Mul: {
        // d out_k / d a_j = D_{k-j}: D is sigma'(a) for activations and the
        // other factor for products.
        const auto& terms = conv_terms(n.value.shape());
        const std::size_t batch = g.batch();
        auto pull = [&](std::uint32_t target, const JetTensor& factor) {
          JetTensor& ga = grad_of(target);
          for (std::size_t r = 0; r < g.rows(); ++r) {
            for (const ConvTerm& t : terms) {
              k.mul_acc(g.row(r) + t.out * batch, factor.row(r) + t.rhs * batch, ga.row(r) + t.lhs * batch, batch);
            }
          }
        };
        if (n.op == Op::Activation) {
          pull(n.parents[0], n.aux);
        } else {
          pull(n.parents[0], nodes_[n.parents[1]].value);
          pull(n.parents[1], nodes_[n.parents[0]].value);
        }
        break;
      }
      case Op::FoldRows: {
        JetTensor& ga = grad_of(n.parents[0]);
        for (std::size_t r = 0; r < ga.rows(); ++r) k.axpy(1.0, g.row(r % g.rows()), ga.row(r), g.row_length());
        break;
      }
      case Op::Add:
        add_into(grad_of(n.parents[0]), g, 1.0);
        add_into(grad_of(n.parents[1]), g, 1.0);
        break;
      case Op::Sub:
        add_into(grad_of(n.parents[0]), g, 1.0);
        add_into(grad_of(n.parents[1]), g, -1.0);
        break;
      case Op::Scale:
        add_into(grad_of(n.parents[0]), g, n.s);
        break;
      case Op::AddConstant:
        add_into(grad_of(n.parents[0]), g, 1.0);
        break;
      case Op::SliceRows: {
        JetTensor& ga = grad_of(n.parents[0]);
        k.axpy(1.0, g.row(0), ga.row(n.a), g.size());
        break;
      }
      case Op::ConcatRows: {
        const double* src = g.data().data();
        for (std::uint32_t p : n.parents) {
          JetTensor& ga = grad_of(p);
          k.axpy(1.0, src, ga.data().data(), ga.size());
          src += ga.size();
        }
        break;
      }
      case Op::SumRows: {
        JetTensor& ga = grad_of(n.parents[0]);
        for (std::size_t r = 0; r < ga.rows(); ++r) k.axpy(1.0, g.row(0), ga.row(r), g.row_length());
        break;
      }
      case Op::Coefficient: {
        JetTensor& ga = grad_of(n.parents[0]);
        for (std::size_t r = 0; r < g.rows(); ++r) k.axpy(1.0, g.row(r), ga.coeff(r, n.a), g.batch());
        break;
      }
      case Op::SquaredNorm: {
        const JetTensor& a = nodes_[n.parents[0]].value;
        k.axpy(2.0 * n.s * g.data()[0], a.data().data(), grad_of(n.parents[0]).data().data(), a.size());
        break;
      }
    }
  }
  return out;
}

}  // namespace mimres

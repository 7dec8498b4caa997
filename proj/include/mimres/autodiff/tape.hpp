#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "mimres/autodiff/jet_tensor.hpp"

namespace mimres {

class BindingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct NodeId {
  std::uint32_t index = 0;
  bool operator==(const NodeId&) const = default;
};

/// Location of a bound parameter vector inside the tape's joint gradient.
struct ParamSlot {
  std::size_t offset = 0;
  std::size_t size = 0;
  std::uint32_t id = 0;
};

/// Gradient of a recorded scalar with respect to every bound parameter, laid
/// out as the concatenation of the bound vectors in binding order.
struct Adjoint {
  std::vector<double> gradient;
};

/// Append-only reverse-mode tape over batched jet values.
///
/// Every node holds a JetTensor. Jet coefficients are ordinary differentiable
/// quantities here, so any input derivative read off a jet (a Laplacian, a
/// third derivative, a Hessian entry) stays differentiable with respect to the
/// bound parameters. Single-threaded; use one tape per thread.
class Tape {
 public:
  /// Registers a parameter vector. Binding the same storage twice returns the
  /// existing slot.
  ParamSlot bind(std::span<const double> params);
  std::size_t parameter_count() const { return parameter_count_; }

  NodeId constant(JetTensor value);
  /// Leaf exposing params[offset, offset + count) of a bound slot as an
  /// order-0 tensor with `count` rows and batch 1.
  NodeId parameters(ParamSlot slot, std::size_t offset, std::size_t count);

  NodeId affine(NodeId x, NodeId weights, NodeId bias);
  NodeId activation(NodeId x, ActivationKind kind);
  NodeId fold_rows(NodeId x, std::size_t out_rows);

  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  /// Truncated jet product, elementwise over rows and batch.
  NodeId mul(NodeId a, NodeId b);
  NodeId scale(NodeId a, double s);
  /// a + c for a constant tensor of the same layout.
  NodeId add_constant(NodeId a, const JetTensor& c);

  NodeId slice_rows(NodeId a, std::size_t begin, std::size_t count);
  NodeId concat_rows(std::span<const NodeId> parts);
  NodeId sum_rows(NodeId a);
  /// Coefficient (i, j) of every jet, as an order-0 tensor.
  NodeId coefficient(NodeId a, int i, int j = 0);
  /// weight * sum over rows and batch of a^2; `a` must be order 0.
  NodeId squared_norm(NodeId a, double weight);

  const JetTensor& value(NodeId id) const;
  /// Value of a one-element node.
  double scalar(NodeId id) const;

  /// Reverse pass from a one-element root. Const: repeated calls give
  /// identical results.
  Adjoint backward(NodeId root) const;

  std::size_t size() const { return nodes_.size(); }
  void clear();

 private:
  enum class Op : std::uint8_t {
    Constant,
    Parameters,
    Affine,
    Activation,
    FoldRows,
    Add,
    Sub,
    Mul,
    Scale,
    AddConstant,
    SliceRows,
    ConcatRows,
    SumRows,
    Coefficient,
    SquaredNorm,
  };

  struct Node {
    Op op;
    std::vector<std::uint32_t> parents;
    JetTensor value;
    JetTensor aux;
    std::size_t a = 0;
    std::size_t b = 0;
    double s = 0.0;
  };

  NodeId push(Node node);
  const Node& node(NodeId id) const;

  std::vector<Node> nodes_;
  std::vector<ParamSlot> slots_;
  std::vector<const double*> slot_data_;
  std::size_t parameter_count_ = 0;
};

}  // namespace mimres

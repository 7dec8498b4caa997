#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mimres/autodiff/field.hpp"
#include "mimres/autodiff/tape.hpp"
#include "mimres/network/model.hpp"
#include "mimres/problems/problems.hpp"
#include "mimres/sampling/sampling.hpp"

namespace mimres {

struct PenaltyWeights {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double lambda3 = 1.0;
};

/// One iteration's collocation sets and the measures their means are scaled
/// by. `initial` and `periodic` are only used by time-dependent problems.
struct LossBatch {
  PointSet interior;
  BoundarySet boundary;
  PointSet initial;
  PointSet periodic;
  double interior_measure = 1.0;
  double boundary_measure = 1.0;
  double initial_measure = 1.0;
  double periodic_measure = 1.0;
};

LossBatch draw_batch(const ProblemSpec& problem, Sampler& sampler);

/// How a Neumann condition entered the loss.
enum class NeumannForm {
  None,        // the problem has no Neumann condition
  Derivative,  // lambda ||du/dn - g||^2
  Flux,        // lambda ||p . n - g||^2
  Multiplier,  // exactly satisfied by construction, no penalty
};

std::string_view to_string(NeumannForm form);

/// One summand of the loss: weight * node, where node is the
/// measure-weighted Monte Carlo mean of a squared residual.
struct LossTerm {
  std::string name;
  NodeId node;
  double weight = 1.0;
  bool penalty = false;
};

struct LossRecord {
  NodeId total;
  std::vector<LossTerm> terms;
  NeumannForm neumann = NeumannForm::None;

  const LossTerm* find(std::string_view name) const;
  std::size_t residual_count() const;
  std::size_t penalty_count() const;
};

/// Least-squares PDE residual of a scalar field plus boundary, initial and
/// periodic penalties.
LossRecord dgm_loss(Tape& tape, const ProblemSpec& problem, const Field& u, const LossBatch& batch,
                    const PenaltyWeights& weights);

/// First-order system residuals of the unknowns [u | p | q | w] plus
/// penalties. With `neumann_exact` the field already satisfies the Poisson
/// Neumann condition (see NeumannMultiplierField) and that penalty is dropped.
LossRecord mim_loss(Tape& tape, const ProblemSpec& problem, const Field& unknowns, const UnknownLayout& layout,
                    const LossBatch& batch, const PenaltyWeights& weights, bool neumann_exact = false);

/// Dispatches on the method.
LossRecord build_loss(Tape& tape, const ProblemSpec& problem, MethodKind method, const Field& unknowns,
                      const UnknownLayout& layout, const LossBatch& batch, const PenaltyWeights& weights,
                      bool neumann_exact = false);

/// x (1 - x), the factor making p_i vanish on the faces x_i in {0, 1}.
Jet neumann_multiplier(const Jet& x);

/// p_i = x_i (1 - x_i) raw_p_i.
std::vector<Jet> neumann_multiplier_wrap(std::span<const Jet> raw_p, std::span<const Jet> x);

/// Applies neumann_multiplier_wrap to the p rows of another field.
class NeumannMultiplierField final : public Field {
 public:
  NeumannMultiplierField(const Field& inner, GroupRange p);

  std::size_t input_dim() const override { return inner_.input_dim(); }
  std::size_t output_dim() const override { return inner_.output_dim(); }
  JetTensor evaluate(const JetTensor& input) const override;
  NodeId record(Tape& tape, NodeId input) const override;

 private:
  JetTensor multipliers(const JetTensor& input) const;

  const Field& inner_;
  GroupRange p_;
};

/// Tape arithmetic for determinant().
struct TapeOps {
  Tape& tape;
  NodeId add(NodeId a, NodeId b) const { return tape.add(a, b); }
  NodeId sub(NodeId a, NodeId b) const { return tape.sub(a, b); }
  NodeId mul(NodeId a, NodeId b) const { return tape.mul(a, b); }
  NodeId neg(NodeId a) const { return tape.scale(a, -1.0); }
};

/// Describes why an activation cannot represent the derivatives a loss
/// needs (e.g. ReLU under DGM has a zero Laplacian), or nothing when it can.
std::optional<std::string> derivative_order_warning(ProblemKind problem, MethodKind method, VariantKind variant,
                                                    ActivationKind activation);

}  // namespace mimres

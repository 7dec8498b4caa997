#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "mimres/network/network.hpp"

namespace mimres {

/// Rows [begin, begin + count) of the unknown vector.
struct GroupRange {
  std::size_t begin = 0;
  std::size_t count = 0;
  bool present() const { return count > 0; }
};

/// Output layout [u | p | q | w] of the unknowns for one configuration. DGM
/// carries u only.
struct UnknownLayout {
  GroupRange u, p, q, w;
  std::size_t total = 0;

  /// Sizes of the present groups in order; one network each under MIM2.
  std::vector<std::size_t> group_sizes() const;
};

UnknownLayout unknown_layout(MethodKind method, ProblemKind problem, VariantKind variant, std::size_t dim);

/// Network input size: d, or d + 1 with time as the last coordinate for KdV.
std::size_t input_dim(ProblemKind problem, std::size_t dim);

struct ModelConfig {
  MethodKind method = MethodKind::MIM1;
  ProblemKind problem = ProblemKind::Poisson;
  VariantKind variant = VariantKind::All;
  std::size_t dim = 2;
  std::size_t depth = 2;
  std::size_t width = 10;
  ActivationKind activation = ActivationKind::Square;
};

std::vector<NetworkSpec> network_specs(const ModelConfig& config);

/// All networks of one configuration over a single contiguous parameter
/// vector (networks in layout order), exposed as one Field with the
/// [u | p | q | w] output layout.
class Model {
 public:
  Model(const ModelConfig& config, std::uint64_t seed);
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  const ModelConfig& config() const { return config_; }
  const UnknownLayout& layout() const { return layout_; }
  const Field& field() const { return *field_; }

  std::size_t network_count() const { return specs_.size(); }
  const NetworkSpec& spec(std::size_t i) const { return specs_[i]; }
  std::span<double> network_params(std::size_t i);
  std::span<const double> network_params(std::size_t i) const;

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  void set_params(std::span<const double> values);

  /// Binds every network's parameters to the tape in order, so the tape's
  /// gradient lines up with params().
  void bind(Tape& tape) const;

 private:
  ModelConfig config_;
  UnknownLayout layout_;
  std::vector<NetworkSpec> specs_;
  std::vector<std::size_t> offsets_;
  ParamVector params_;
  std::vector<std::unique_ptr<NetworkEval>> nets_;
  std::unique_ptr<StackedField> stacked_;
  const Field* field_ = nullptr;
};

}  // namespace mimres

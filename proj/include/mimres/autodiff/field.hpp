#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "mimres/autodiff/jet_tensor.hpp"
#include "mimres/autodiff/tape.hpp"

namespace mimres {

/// A vector-valued function R^input_dim -> R^output_dim that can be pushed
/// through jets, either directly or recorded on a tape.
class Field {
 public:
  virtual ~Field() = default;

  virtual std::size_t input_dim() const = 0;
  virtual std::size_t output_dim() const = 0;

  /// input: [input_dim][shape][batch] -> [output_dim][shape][batch]
  virtual JetTensor evaluate(const JetTensor& input) const = 0;

  /// Records the evaluation. The default treats the field as parameter-free
  /// and stores evaluate(value(input)) as a constant.
  virtual NodeId record(Tape& tape, NodeId input) const;
};

/// Closed-form field built from a jet function, e.g. an exact solution.
class AnalyticField final : public Field {
 public:
  using Function = std::function<std::vector<Jet>(std::span<const Jet>)>;

  AnalyticField(std::size_t input_dim, std::size_t output_dim, Function fn);

  std::size_t input_dim() const override { return input_dim_; }
  std::size_t output_dim() const override { return output_dim_; }
  JetTensor evaluate(const JetTensor& input) const override;

 private:
  std::size_t input_dim_;
  std::size_t output_dim_;
  Function fn_;
};

/// Concatenates the outputs of several fields sharing one input.
class StackedField final : public Field {
 public:
  explicit StackedField(std::vector<const Field*> parts);

  std::size_t input_dim() const override;
  std::size_t output_dim() const override;
  JetTensor evaluate(const JetTensor& input) const override;
  NodeId record(Tape& tape, NodeId input) const override;

 private:
  std::vector<const Field*> parts_;
};

/// Pointwise convenience: all outputs of `field` at one jet-valued input.
std::vector<Jet> evaluate_point(const Field& field, std::span<const Jet> input);

}  // namespace mimres

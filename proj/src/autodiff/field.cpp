#include "mimres/autodiff/field.hpp"

#include <algorithm>
#include <string>

namespace mimres {

NodeId Field::record(Tape& tape, NodeId input) const { return tape.constant(evaluate(tape.value(input))); }

AnalyticField::AnalyticField(std::size_t input_dim, std::size_t output_dim, Function fn)
    : input_dim_(input_dim), output_dim_(output_dim), fn_(std::move(fn)) {}

JetTensor AnalyticField::evaluate(const JetTensor& input) const {
  if (input.rows() != input_dim_) throw ShapeError("analytic field: input dimension mismatch");
  JetTensor out(output_dim_, input.shape(), input.batch());
  std::vector<Jet> x(input_dim_);
  for (std::size_t b = 0; b < input.batch(); ++b) {
    for (std::size_t i = 0; i < input_dim_; ++i) x[i] = input.jet(i, b);
    const std::vector<Jet> y = fn_(x);
    if (y.size() != output_dim_) throw ShapeError("analytic field returned " + std::to_string(y.size()) + " outputs");
    for (std::size_t r = 0; r < output_dim_; ++r) out.set_jet(r, b, y[r]);
  }
  return out;
}

StackedField::StackedField(std::vector<const Field*> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw ShapeError("stacked field needs at least one part");
  for (const Field* p : parts_) {
    if (p->input_dim() != parts_[0]->input_dim()) throw ShapeError("stacked field parts differ in input dimension");
  }
}

std::size_t StackedField::input_dim() const { return parts_[0]->input_dim(); }

std::size_t StackedField::output_dim() const {
  std::size_t n = 0;
  for (const Field* p : parts_) n += p->output_dim();
  return n;
}

JetTensor StackedField::evaluate(const JetTensor& input) const {
  JetTensor out(output_dim(), input.shape(), input.batch());
  double* dst = out.data().data();
  for (const Field* p : parts_) {
    const JetTensor part = p->evaluate(input);
    dst = std::copy(part.data().begin(), part.data().end(), dst);
  }
  return out;
}

NodeId StackedField::record(Tape& tape, NodeId input) const {
  std::vector<NodeId> nodes;
  nodes.reserve(parts_.size());
  for (const Field* p : parts_) nodes.push_back(p->record(tape, input));
  return tape.concat_rows(nodes);
}

std::vector<Jet> evaluate_point(const Field& field, std::span<const Jet> input) {
  if (input.empty()) throw ShapeError("evaluate_point: empty input");
  JetTensor x(input.size(), input[0].shape(), 1);
  for (std::size_t i = 0; i < input.size(); ++i) x.set_jet(i, 0, input[i]);
  const JetTensor y = field.evaluate(x);
  std::vector<Jet> out(y.rows());
  for (std::size_t r = 0; r < y.rows(); ++r) out[r] = y.jet(r, 0);
  return out;
}

}  // namespace mimres

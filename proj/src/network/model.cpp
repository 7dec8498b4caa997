#include "mimres/network/model.hpp"

#include <algorithm>
#include <string>

#include "mimres/rng.hpp"

namespace mimres {

std::vector<std::size_t> UnknownLayout::group_sizes() const {
  std::vector<std::size_t> sizes;
  for (const GroupRange& g : {u, p, q, w}) {
    if (g.present()) sizes.push_back(g.count);
  }
  return sizes;
}

UnknownLayout unknown_layout(MethodKind method, ProblemKind problem, VariantKind variant, std::size_t dim) {
  validate_combination(method, problem, variant);
  if (dim == 0) throw ConfigError("dimension must be positive");
  std::size_t p = 0, q = 0, w = 0;
  if (method != MethodKind::DGM) {
    switch (problem) {
      case ProblemKind::Poisson:
      case ProblemKind::MongeAmpere:
        p = dim;
        break;
      case ProblemKind::Biharmonic:
        if (variant == VariantKind::All) {
          p = dim;
          q = 1;
          w = dim;
        } else {
          q = 1;
        }
        break;
      case ProblemKind::KdV:
        p = dim;
        q = dim;
        break;
    }
  }
  UnknownLayout layout;
  layout.u = {0, 1};
  layout.p = {1, p};
  layout.q = {1 + p, q};
  layout.w = {1 + p + q, w};
  layout.total = 1 + p + q + w;
  return layout;
}

std::size_t input_dim(ProblemKind problem, std::size_t dim) { return problem == ProblemKind::KdV ? dim + 1 : dim; }

std::vector<NetworkSpec> network_specs(const ModelConfig& config) {
  const UnknownLayout layout = unknown_layout(config.method, config.problem, config.variant, config.dim);
  NetworkSpec base{config.depth, config.width, input_dim(config.problem, config.dim), layout.total, config.activation};
  if (config.method != MethodKind::MIM2) return {base};
  std::vector<NetworkSpec> specs;
  for (std::size_t size : layout.group_sizes()) {
    NetworkSpec s = base;
    s.output_dim = size;
    specs.push_back(s);
  }
  return specs;
}

Model::Model(const ModelConfig& config, std::uint64_t seed)
    : config_(config),
      layout_(unknown_layout(config.method, config.problem, config.variant, config.dim)),
      specs_(network_specs(config)) {
  std::size_t total = 0;
  for (const NetworkSpec& s : specs_) {
    offsets_.push_back(total);
    total += param_length(s);
  }
  offsets_.push_back(total);
  params_.resize(total);
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const ParamVector init = init_params(specs_[i], splitmix64(seed ^ (0xA5A5A5A5ULL + i)));
    std::copy(init.begin(), init.end(), params_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]));
  }
  std::vector<const Field*> parts;
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    nets_.push_back(std::make_unique<NetworkEval>(specs_[i], network_params(i)));
    parts.push_back(nets_.back().get());
  }
  if (parts.size() == 1) {
    field_ = parts[0];
  } else {
    stacked_ = std::make_unique<StackedField>(parts);
    field_ = stacked_.get();
  }
}

std::span<double> Model::network_params(std::size_t i) {
  return std::span<double>(params_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
}

std::span<const double> Model::network_params(std::size_t i) const {
  return std::span<const double>(params_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
}

void Model::set_params(std::span<const double> values) {
  if (values.size() != params_.size()) {
    throw ShapeError("model expects " + std::to_string(params_.size()) + " parameters, got " +
                     std::to_string(values.size()));
  }
  std::copy(values.begin(), values.end(), params_.begin());
}

void Model::bind(Tape& tape) const {
  for (std::size_t i = 0; i < specs_.size(); ++i) tape.bind(network_params(i));
}

}  // namespace mimres

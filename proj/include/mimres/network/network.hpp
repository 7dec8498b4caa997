#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mimres/autodiff/field.hpp"
#include "mimres/kinds.hpp"

namespace mimres {

/// ResNet shape: `depth` blocks of width `width`,
///   s_k = sigma(W2_k sigma(W1_k s_{k-1} + b1_k) + b2_k) + s_{k-1},
/// followed by an affine output map T.
///
/// The input is never stored in R^width: block 1's inner map W1_1 is
/// width x input_dim and acts on x directly, and its shortcut s_0 is the fixed
/// zero-padding of x into R^width (coordinate i lands in slot i mod width when
/// input_dim > width). Blocks 2..depth are width x width.
struct NetworkSpec {
  std::size_t depth = 1;
  std::size_t width = 1;
  std::size_t input_dim = 1;
  std::size_t output_dim = 1;
  ActivationKind activation = ActivationKind::Square;

  bool operator==(const NetworkSpec&) const = default;
};

/// Flat parameter storage, ordered per block k = 1..depth as
/// W1_k (row-major), b1_k, W2_k, b2_k, then T (output_dim x width), c.
using ParamVector = std::vector<double>;

/// Offsets of one block's parameters inside a ParamVector.
struct BlockOffsets {
  std::size_t w1, b1, w2, b2;
  std::size_t w1_cols;
};

struct ParamLayout {
  std::vector<BlockOffsets> blocks;
  std::size_t out_w = 0;
  std::size_t out_b = 0;
  std::size_t total = 0;
};

ParamLayout param_layout(const NetworkSpec& spec);
std::size_t param_length(const NetworkSpec& spec);
void validate(const NetworkSpec& spec);

/// Uniform on +-sqrt(1/fan_in) for weights, zero biases. Deterministic in seed.
ParamVector init_params(const NetworkSpec& spec, std::uint64_t seed);

/// A (NetworkSpec, parameters) binding. Holds a view of the parameters, which
/// must outlive it.
class NetworkEval final : public Field {
 public:
  NetworkEval(NetworkSpec spec, std::span<const double> params);

  const NetworkSpec& spec() const { return spec_; }
  std::span<const double> params() const { return params_; }

  std::size_t input_dim() const override { return spec_.input_dim; }
  std::size_t output_dim() const override { return spec_.output_dim; }

  std::vector<double> forward(std::span<const double> x) const;
  std::vector<Jet> forward(std::span<const Jet> x) const;

  JetTensor evaluate(const JetTensor& input) const override;
  NodeId record(Tape& tape, NodeId input) const override;

 private:
  NetworkSpec spec_;
  ParamLayout layout_;
  std::span<const double> params_;
};

/// Closed-form parameter total for every network of a configuration. Counts
/// KdV networks with input dimension d + 1 (time is an input).
std::size_t parameter_count(MethodKind method, ProblemKind problem, VariantKind variant, std::size_t depth,
                            std::size_t width, std::size_t dim);

/// The published closed forms taken verbatim, i.e. with the spatial dimension
/// as the input size for every problem including KdV.
std::size_t published_parameter_count(MethodKind method, ProblemKind problem, VariantKind variant,
                                      std::size_t depth, std::size_t width, std::size_t dim);

// Checkpoint file: "MIMPARAM", u32 version, u32 count, count little-endian
// float64 values.
inline constexpr std::uint32_t kCheckpointVersion = 1;
void write_checkpoint(const std::filesystem::path& path, std::span<const double> params);
ParamVector read_checkpoint(const std::filesystem::path& path);

}  // namespace mimres

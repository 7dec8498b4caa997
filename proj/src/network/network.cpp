#include "mimres/network/network.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "mimres/rng.hpp"

namespace mimres {

void validate(const NetworkSpec& spec) {
  if (spec.depth == 0 || spec.width == 0 || spec.input_dim == 0 || spec.output_dim == 0) {
    throw ConfigError("network depth, width and dimensions must be positive");
  }
}

ParamLayout param_layout(const NetworkSpec& spec) {
  validate(spec);
  const std::size_t n = spec.width;
  ParamLayout layout;
  std::size_t at = 0;
  for (std::size_t k = 0; k < spec.depth; ++k) {
    BlockOffsets b{};
    b.w1_cols = k == 0 ? spec.input_dim : n;
    b.w1 = at;
    at += n * b.w1_cols;
    b.b1 = at;
    at += n;
    b.w2 = at;
    at += n * n;
    b.b2 = at;
    at += n;
    layout.blocks.push_back(b);
  }
  layout.out_w = at;
  at += spec.output_dim * n;
  layout.out_b = at;
  at += spec.output_dim;
  layout.total = at;
  return layout;
}

std::size_t param_length(const NetworkSpec& spec) { return param_layout(spec).total; }

ParamVector init_params(const NetworkSpec& spec, std::uint64_t seed) {
  const ParamLayout layout = param_layout(spec);
  ParamVector params(layout.total, 0.0);
  Rng rng(splitmix64(seed));
  auto fill = [&](std::size_t offset, std::size_t rows, std::size_t cols) {
    const double bound = std::sqrt(1.0 / static_cast<double>(cols));
    for (std::size_t i = 0; i < rows * cols; ++i) params[offset + i] = rng.uniform(-bound, bound);
  };
  const std::size_t n = spec.width;
  for (const BlockOffsets& b : layout.blocks) {
    fill(b.w1, n, b.w1_cols);
    fill(b.w2, n, n);
  }
  fill(layout.out_w, spec.output_dim, n);
  return params;
}

NetworkEval::NetworkEval(NetworkSpec spec, std::span<const double> params)
    : spec_(spec), layout_(param_layout(spec)), params_(params) {
  if (params.size() != layout_.total) {
    throw ShapeError("network expects " + std::to_string(layout_.total) + " parameters, got " +
                     std::to_string(params.size()));
  }
}

JetTensor NetworkEval::evaluate(const JetTensor& input) const {
  if (input.rows() != spec_.input_dim) throw ShapeError("network input dimension mismatch");
  const std::size_t n = spec_.width;
  auto slice = [this](std::size_t offset, std::size_t count) { return params_.subspan(offset, count); };

  JetTensor s = fold_rows(input, n);
  const JetTensor* x = &input;
  for (const BlockOffsets& b : layout_.blocks) {
    JetTensor h = activation_forward(spec_.activation, affine_forward(slice(b.w1, n * b.w1_cols), slice(b.b1, n), *x, n), nullptr);
    JetTensor next = activation_forward(spec_.activation, affine_forward(slice(b.w2, n * n), slice(b.b2, n), h, n), nullptr);
    add_into(next, s);
    s = std::move(next);
    x = &s;
  }
  return affine_forward(slice(layout_.out_w, spec_.output_dim * n), slice(layout_.out_b, spec_.output_dim), s,
                        spec_.output_dim);
}

NodeId NetworkEval::record(Tape& tape, NodeId input) const {
  if (tape.value(input).rows() != spec_.input_dim) throw ShapeError("network input dimension mismatch");
  const std::size_t n = spec_.width;
  const ParamSlot slot = tape.bind(params_);

  NodeId s = tape.fold_rows(input, n);
  NodeId x = input;
  for (const BlockOffsets& b : layout_.blocks) {
    const NodeId w1 = tape.parameters(slot, b.w1, n * b.w1_cols);
    const NodeId b1 = tape.parameters(slot, b.b1, n);
    const NodeId w2 = tape.parameters(slot, b.w2, n * n);
    const NodeId b2 = tape.parameters(slot, b.b2, n);
    const NodeId h = tape.activation(tape.affine(x, w1, b1), spec_.activation);
    const NodeId inner = tape.activation(tape.affine(h, w2, b2), spec_.activation);
    s = tape.add(inner, s);
    x = s;
  }
  const NodeId t = tape.parameters(slot, layout_.out_w, spec_.output_dim * n);
  const NodeId c = tape.parameters(slot, layout_.out_b, spec_.output_dim);
  return tape.affine(s, t, c);
}

std::vector<double> NetworkEval::forward(std::span<const double> x) const {
  if (x.size() != spec_.input_dim) throw ShapeError("network input dimension mismatch");
  JetTensor in(x.size(), JetShape{}, 1);
  for (std::size_t i = 0; i < x.size(); ++i) in.at(i, 0, 0) = x[i];
  const JetTensor out = evaluate(in);
  return {out.data().begin(), out.data().end()};
}

std::vector<Jet> NetworkEval::forward(std::span<const Jet> x) const { return evaluate_point(*this, x); }

namespace {

std::size_t networks_in(MethodKind method, ProblemKind problem, VariantKind variant) {
  if (method != MethodKind::MIM2) return 1;
  switch (problem) {
    case ProblemKind::Poisson:
    case ProblemKind::MongeAmpere:
      return 2;
    case ProblemKind::Biharmonic:
      return variant == VariantKind::All ? 4 : 2;
    case ProblemKind::KdV:
      return 3;
  }
  return 1;
}

}  // namespace

std::size_t published_parameter_count(MethodKind method, ProblemKind problem, VariantKind variant,
                                      std::size_t depth, std::size_t width, std::size_t dim) {
  validate_combination(method, problem, variant);
  const std::size_t m = depth, n = width, d = dim;
  if (method == MethodKind::DGM) return (2 * m - 1) * n * n + (2 * m + d + 1) * n + 1;
  const bool one = method == MethodKind::MIM1;
  switch (problem) {
    case ProblemKind::Poisson:
    case ProblemKind::MongeAmpere:
      return one ? (2 * m - 1) * n * n + (2 * m + 2 * d + 1) * n + d + 1
                 : (4 * m - 2) * n * n + (4 * m + 3 * d + 1) * n + d + 1;
    case ProblemKind::Biharmonic:
      if (variant == VariantKind::All) {
        return one ? (2 * m - 1) * n * n + (2 * m + 3 * d + 2) * n + 2 * d + 2
                   : (8 * m - 4) * n * n + (8 * m + 6 * d + 2) * n + 2 * d + 2;
      }
      return one ? (2 * m - 1) * n * n + (2 * m + d + 2) * n + 2
                 : (4 * m - 2) * n * n + (4 * m + 2 * d + 2) * n + 2;
    case ProblemKind::KdV:
      return one ? (2 * m - 1) * n * n + (2 * m + 3 * d + 1) * n + 2 * d + 1
                 : (6 * m - 3) * n * n + (6 * m + 5 * d + 1) * n + 2 * d + 1;
  }
  return 0;
}

std::size_t parameter_count(MethodKind method, ProblemKind problem, VariantKind variant, std::size_t depth,
                            std::size_t width, std::size_t dim) {
  std::size_t count = published_parameter_count(method, problem, variant, depth, width, dim);
  // Time is an extra input coordinate: one more column in each W1_1.
  if (problem == ProblemKind::KdV) count += networks_in(method, problem, variant) * width;
  return count;
}

namespace {

constexpr std::array<char, 8> kMagic{'M', 'I', 'M', 'P', 'A', 'R', 'A', 'M'};

void put_u32(std::ostream& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::ostream& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_le(std::istream& in, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    const int c = in.get();
    if (c == EOF) throw std::runtime_error("checkpoint: unexpected end of file");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

}  // namespace

void write_checkpoint(const std::filesystem::path& path, std::span<const double> params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open checkpoint " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(params.size()));
  for (double v : params) put_u64(out, std::bit_cast<std::uint64_t>(v));
  if (!out) throw std::runtime_error("failed writing checkpoint " + path.string());
}

ParamVector read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error("checkpoint: bad magic in " + path.string());
  const auto version = static_cast<std::uint32_t>(get_le(in, 4));
  if (version != kCheckpointVersion) throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  const auto count = static_cast<std::uint32_t>(get_le(in, 4));
  ParamVector params(count);
  for (double& v : params) v = std::bit_cast<double>(get_le(in, 8));
  return params;
}

}  // namespace mimres

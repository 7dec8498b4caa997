#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mimres {

enum class ActivationKind { Square, ReLU, ReQU, ReCU };
enum class ProblemKind { Poisson, MongeAmpere, Biharmonic, KdV };
enum class MethodKind { DGM, MIM1, MIM2 };

/// Biharmonic only: All carries (u, p, q, w), Partial carries (u, q).
enum class VariantKind { All, Partial };

/// Thrown for invalid (method, problem, variant, ...) combinations and bad
/// run configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string_view to_string(ActivationKind kind);
std::string_view to_string(ProblemKind kind);
std::string_view to_string(MethodKind kind);
std::string_view to_string(VariantKind kind);

// Parsers accept the CLI spellings (e.g. "monge-ampere", "mim1", "requ")
// and throw ConfigError on anything else.
ActivationKind parse_activation(std::string_view text);
ProblemKind parse_problem(std::string_view text);
MethodKind parse_method(std::string_view text);
VariantKind parse_variant(std::string_view text);

/// Partial is only defined for MIM on the biharmonic problem.
void validate_combination(MethodKind method, ProblemKind problem, VariantKind variant);

}  // namespace mimres

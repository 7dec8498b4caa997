#include "mimres/kinds.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <utility>

namespace mimres {
namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

template <typename Enum, std::size_t N>
Enum lookup(std::string_view text, const std::array<std::pair<std::string_view, Enum>, N>& table,
            std::string_view what) {
  const std::string key = lower(text);
  for (const auto& [name, value] : table) {
    if (name == key) return value;
  }
  throw ConfigError("unknown " + std::string(what) + " '" + std::string(text) + "'");
}

constexpr std::array<std::pair<std::string_view, ActivationKind>, 4> kActivations{{
    {"square", ActivationKind::Square},
    {"relu", ActivationKind::ReLU},
    {"requ", ActivationKind::ReQU},
    {"recu", ActivationKind::ReCU},
}};

constexpr std::array<std::pair<std::string_view, ProblemKind>, 4> kProblems{{
    {"poisson", ProblemKind::Poisson},
    {"monge-ampere", ProblemKind::MongeAmpere},
    {"biharmonic", ProblemKind::Biharmonic},
    {"kdv", ProblemKind::KdV},
}};

constexpr std::array<std::pair<std::string_view, MethodKind>, 3> kMethods{{
    {"dgm", MethodKind::DGM},
    {"mim1", MethodKind::MIM1},
    {"mim2", MethodKind::MIM2},
}};

constexpr std::array<std::pair<std::string_view, VariantKind>, 2> kVariants{{
    {"all", VariantKind::All},
    {"partial", VariantKind::Partial},
}};

template <typename Enum, std::size_t N>
std::string_view name_of(Enum value, const std::array<std::pair<std::string_view, Enum>, N>& table) {
  for (const auto& [name, v] : table) {
    if (v == value) return name;
  }
  return "?";
}

}  // namespace

std::string_view to_string(ActivationKind kind) { return name_of(kind, kActivations); }
std::string_view to_string(ProblemKind kind) { return name_of(kind, kProblems); }
std::string_view to_string(MethodKind kind) { return name_of(kind, kMethods); }
std::string_view to_string(VariantKind kind) { return name_of(kind, kVariants); }

ActivationKind parse_activation(std::string_view text) { return lookup(text, kActivations, "activation"); }
ProblemKind parse_problem(std::string_view text) { return lookup(text, kProblems, "problem"); }
MethodKind parse_method(std::string_view text) { return lookup(text, kMethods, "method"); }
VariantKind parse_variant(std::string_view text) { return lookup(text, kVariants, "variant"); }

void validate_combination(MethodKind method, ProblemKind problem, VariantKind variant) {
  if (variant == VariantKind::Partial && (problem != ProblemKind::Biharmonic || method == MethodKind::DGM)) {
    throw ConfigError("variant 'partial' only applies to MIM on the biharmonic problem");
  }
}

}  // namespace mimres

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "crl/graphs.hpp"
#include "crl/notears.hpp"

namespace crl {

// Binary encodings shared by datasets, the digital mind and observations.
enum class Texture : int { Rough = 0, Smooth = 1 };
enum class Shape : int { Column = 0, Debris = 1 };

/// Boolean combination applied to the parents of a caused variable. With a single parent
/// every rule reduces to the identity.
enum class StructuralRule { And, Or, Xor };

struct UniverseSpec {
  std::string id;
  std::vector<std::string> variables;  // last entry is always "movability"
  DirectedGraph true_graph;
  std::map<std::string, StructuralRule> rules;  // one entry per variable with parents
  double flip_prob = 0.1;
  double root_prob = 0.5;

  void validate() const;
};

inline constexpr std::string_view kMovability = "movability";

/// U2-linked, U2-indep, U3-partial, U3-full, U3-indep.
std::vector<UniverseSpec> builtin_universes();
UniverseSpec builtin_universe(std::string_view id);

/// n x d matrix of 0/1 values. Roots ~ Bernoulli(root_prob); caused variables are the
/// structural rule of their parents XOR Bernoulli(flip_prob).
Matrix generate_dataset(const UniverseSpec& u, std::size_t n, std::uint64_t seed);

/// Adds k parentless variables (extra1..extrak) ahead of movability.
UniverseSpec extend_with_independent_vars(const UniverseSpec& u, std::size_t k);

enum class CausalLaw { TextureOnly, TextureOnlyWithShapePresent, TextureAndShape };

bool law_movability(CausalLaw law, Texture texture, Shape shape);

/// Whether shape varies between objects under this law.
bool law_uses_shape(CausalLaw law);

std::string to_string(CausalLaw law);
CausalLaw parse_law(std::string_view text);

}  // namespace crl

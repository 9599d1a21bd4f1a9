#include "crl/scenarios.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "crl/common.hpp"

namespace crl {

void UniverseSpec::validate() const {
  if (variables.empty() || variables.back() != kMovability)
    throw Error(fmt::format("universe {}: variables must end with movability", id));
  if (true_graph.labels() != variables) throw Error(fmt::format("universe {}: graph labels differ from variables", id));
  if (!is_acyclic(true_graph)) throw Error(fmt::format("universe {}: true graph is cyclic", id));
  if (!(flip_prob >= 0.0 && flip_prob < 0.5)) throw Error(fmt::format("universe {}: flip_prob must be in [0, 0.5)", id));
  if (!(root_prob >= 0.0 && root_prob <= 1.0)) throw Error(fmt::format("universe {}: root_prob must be in [0, 1]", id));
  for (std::size_t v = 0; v < variables.size(); ++v)
    if (!true_graph.parents(v).empty() && !rules.contains(variables[v]))
      throw Error(fmt::format("universe {}: no structural rule for {}", id, variables[v]));
}

namespace {

UniverseSpec make(std::string id, std::vector<std::string> vars,
                  const std::vector<std::pair<std::string, std::string>>& edges) {
  UniverseSpec u;
  u.id = std::move(id);
  u.variables = vars;
  u.true_graph = DirectedGraph(std::move(vars), edges);
  for (std::size_t v = 0; v < u.variables.size(); ++v)
    if (!u.true_graph.parents(v).empty()) u.rules[u.variables[v]] = StructuralRule::And;
  u.validate();
  return u;
}

}  // namespace

std::vector<UniverseSpec> builtin_universes() {
  return {
      make("U2-linked", {"texture", "movability"}, {{"texture", "movability"}}),
      make("U2-indep", {"texture", "movability"}, {}),
      make("U3-partial", {"texture", "shape", "movability"}, {{"texture", "movability"}}),
      make("U3-full", {"texture", "shape", "movability"}, {{"texture", "movability"}, {"shape", "movability"}}),
      make("U3-indep", {"texture", "shape", "movability"}, {}),
  };
}

UniverseSpec builtin_universe(std::string_view id) {
  for (auto& u : builtin_universes())
    if (u.id == id) return u;
  throw Error(fmt::format("unknown universe '{}'", id));
}

Matrix generate_dataset(const UniverseSpec& u, std::size_t n, std::uint64_t seed) {
  u.validate();
  const std::size_t d = u.variables.size();
  const auto order = topological_order(u.true_graph);
  std::vector<std::vector<std::size_t>> parents(d);
  std::vector<StructuralRule> rule(d, StructuralRule::And);
  for (std::size_t v = 0; v < d; ++v) {
    parents[v] = u.true_graph.parents(v);
    if (auto it = u.rules.find(u.variables[v]); it != u.rules.end()) rule[v] = it->second;
  }

  Rng rng(seed);
  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::vector<int> row(d, 0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t v : order) {
      if (parents[v].empty()) {
        row[v] = bernoulli(rng, u.root_prob) ? 1 : 0;
        continue;
      }
      int value = rule[v] == StructuralRule::And ? 1 : 0;
      for (std::size_t p : parents[v]) {
        switch (rule[v]) {
          case StructuralRule::And: value &= row[p]; break;
          case StructuralRule::Or: value |= row[p]; break;
          case StructuralRule::Xor: value ^= row[p]; break;
        }
      }
      if (bernoulli(rng, u.flip_prob)) value ^= 1;
      row[v] = value;
    }
    for (std::size_t v = 0; v < d; ++v)
      x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(v)) = row[v];
  }
  return x;
}

UniverseSpec extend_with_independent_vars(const UniverseSpec& u, std::size_t k) {
  if (k == 0) return u;
  UniverseSpec out = u;
  out.id = fmt::format("{}+{}", u.id, k);
  out.variables.assign(u.variables.begin(), u.variables.end() - 1);
  for (std::size_t i = 1; i <= k; ++i) out.variables.push_back(fmt::format("extra{}", i));
  out.variables.emplace_back(kMovability);
  DirectedGraph g(out.variables);
  for (auto [i, j] : u.true_graph.edges()) g.add_edge(u.variables[i], u.variables[j]);
  out.true_graph = g;
  out.validate();
  return out;
}

bool law_movability(CausalLaw law, Texture texture, Shape shape) {
  switch (law) {
    case CausalLaw::TextureOnly:
    case CausalLaw::TextureOnlyWithShapePresent:
      return texture == Texture::Smooth;
    case CausalLaw::TextureAndShape:
      return texture == Texture::Smooth && shape == Shape::Debris;
  }
  return false;
}

bool law_uses_shape(CausalLaw law) { return law != CausalLaw::TextureOnly; }

std::string to_string(CausalLaw law) {
  switch (law) {
    case CausalLaw::TextureOnly: return "texture";
    case CausalLaw::TextureOnlyWithShapePresent: return "texture-shape-present";
    case CausalLaw::TextureAndShape: return "texture-and-shape";
  }
  return "?";
}

CausalLaw parse_law(std::string_view text) {
  if (text == "texture" || text == "texture_only") return CausalLaw::TextureOnly;
  if (text == "texture-shape-present" || text == "texture_only_with_shape_present")
    return CausalLaw::TextureOnlyWithShapePresent;
  if (text == "texture-and-shape" || text == "texture_and_shape") return CausalLaw::TextureAndShape;
  throw Error(fmt::format("unknown causal law '{}'", text));
}

}  // namespace crl

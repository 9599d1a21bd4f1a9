#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "crl/graphs.hpp"
#include "crl/notears.hpp"

namespace crl {

/// Conditional probability table of one node. Parent configurations are enumerated in
/// mixed radix with the first parent least significant; `table[config * arity + value]`.
struct Cpt {
  std::vector<std::size_t> parents;
  int arity = 2;
  std::vector<double> table;

  double prob(int value, std::size_t config) const {
    return table[config * static_cast<std::size_t>(arity) + static_cast<std::size_t>(value)];
  }
};

struct BayesNet {
  DirectedGraph graph;
  std::vector<int> arity;
  std::vector<Cpt> cpds;
  double laplace_alpha = 1.0;

  /// Mixed-radix index of the parent values of `node` inside a full assignment.
  std::size_t parent_config(std::size_t node, const std::vector<int>& assignment) const;
  double joint(const std::vector<int>& assignment) const;
};

/// Laplace-smoothed maximum likelihood:
///   P(v = k | c) = (count(v = k, c) + alpha) / (count(c) + alpha * K).
/// A configuration never observed with alpha = 0 gets the uniform row.
/// `data` holds integer codes, one column per graph node; `arity` defaults to all-binary.
BayesNet fit_cpds(const DirectedGraph& graph, const Matrix& data, double alpha = 1.0,
                  std::vector<int> arity = {});

using Evidence = std::map<std::string, int>;

/// Exact posterior P(target = value | evidence) by enumerating the joint.
double query(const BayesNet& net, const std::string& target, int value, const Evidence& evidence);

/// P(movability = 1 | evidence).
double query_movability(const BayesNet& net, const Evidence& evidence);

}  // namespace crl

#include "crl/bayes.hpp"

#include <cmath>

#include <fmt/format.h>

#include "crl/common.hpp"
#include "crl/scenarios.hpp"

namespace crl {

std::size_t BayesNet::parent_config(std::size_t node, const std::vector<int>& assignment) const {
  std::size_t config = 0, radix = 1;
  for (std::size_t p : cpds[node].parents) {
    config += radix * static_cast<std::size_t>(assignment[p]);
    radix *= static_cast<std::size_t>(arity[p]);
  }
  return config;
}

double BayesNet::joint(const std::vector<int>& assignment) const {
  double p = 1.0;
  for (std::size_t v = 0; v < cpds.size(); ++v) p *= cpds[v].prob(assignment[v], parent_config(v, assignment));
  return p;
}

BayesNet fit_cpds(const DirectedGraph& graph, const Matrix& data, double alpha, std::vector<int> arity) {
  if (!is_acyclic(graph)) throw Error("fit_cpds: graph has a cycle");
  const std::size_t d = graph.size();
  if (static_cast<std::size_t>(data.cols()) != d && data.rows() > 0)
    throw Error(fmt::format("fit_cpds: data has {} columns, graph has {} nodes", data.cols(), d));
  if (!(alpha >= 0.0)) throw Error("fit_cpds: alpha must be >= 0");
  if (arity.empty()) arity.assign(d, 2);
  if (arity.size() != d) throw Error("fit_cpds: arity list does not match node count");
  for (int k : arity)
    if (k < 1) throw Error("fit_cpds: arity must be >= 1");

  BayesNet net;
  net.graph = graph;
  net.arity = arity;
  net.laplace_alpha = alpha;
  net.cpds.resize(d);

  std::vector<std::vector<int>> rows(static_cast<std::size_t>(data.rows()), std::vector<int>(d));
  for (Eigen::Index r = 0; r < data.rows(); ++r)
    for (std::size_t v = 0; v < d; ++v) {
      const double x = data(r, static_cast<Eigen::Index>(v));
      const int code = static_cast<int>(std::lround(x));
      if (x != code || code < 0 || code >= arity[v])
        throw Error(fmt::format("fit_cpds: value {} in column {} is not a category code", x, v));
      rows[static_cast<std::size_t>(r)][v] = code;
    }

  for (std::size_t v = 0; v < d; ++v) {
    Cpt& cpt = net.cpds[v];
    cpt.parents = graph.parents(v);
    cpt.arity = arity[v];
    std::size_t configs = 1;
    for (std::size_t p : cpt.parents) configs *= static_cast<std::size_t>(arity[p]);
    std::vector<double> counts(configs * static_cast<std::size_t>(cpt.arity), 0.0);
    for (const auto& row : rows)
      counts[net.parent_config(v, row) * static_cast<std::size_t>(cpt.arity) + static_cast<std::size_t>(row[v])] += 1.0;
    cpt.table.resize(counts.size());
    for (std::size_t c = 0; c < configs; ++c) {
      double total = 0.0;
      for (int k = 0; k < cpt.arity; ++k) total += counts[c * cpt.arity + k];
      const double denom = total + alpha * cpt.arity;
      for (int k = 0; k < cpt.arity; ++k)
        cpt.table[c * cpt.arity + k] = denom > 0.0 ? (counts[c * cpt.arity + k] + alpha) / denom : 1.0 / cpt.arity;
    }
  }
  return net;
}

double query(const BayesNet& net, const std::string& target, int value, const Evidence& evidence) {
  const std::size_t d = net.graph.size();
  const std::size_t t = net.graph.index_of(target);
  if (value < 0 || value >= net.arity[t]) throw Error(fmt::format("query: value {} out of range for {}", value, target));
  std::vector<int> fixed(d, -1);
  for (const auto& [name, v] : evidence) {
    const std::size_t i = net.graph.index_of(name);
    if (v < 0 || v >= net.arity[i]) throw Error(fmt::format("query: evidence {}={} out of range", name, v));
    fixed[i] = v;
  }

  // Odometer over every full assignment consistent with the evidence.
  std::vector<int> a(d, 0);
  for (std::size_t i = 0; i < d; ++i)
    if (fixed[i] >= 0) a[i] = fixed[i];
  double numer = 0.0, denom = 0.0;
  while (true) {
    const double p = net.joint(a);
    denom += p;
    if (a[t] == value) numer += p;
    std::size_t i = 0;
    for (; i < d; ++i) {
      if (fixed[i] >= 0) continue;
      if (++a[i] < net.arity[i]) break;
      a[i] = 0;
    }
    if (i == d) break;
  }
  if (denom <= 0.0) throw Error("query: evidence has zero probability");
  return numer / denom;
}

double query_movability(const BayesNet& net, const Evidence& evidence) {
  return query(net, std::string(kMovability), 1, evidence);
}

}  // namespace crl

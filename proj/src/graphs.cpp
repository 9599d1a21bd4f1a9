#include "crl/graphs.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "crl/common.hpp"

namespace crl {

DirectedGraph::DirectedGraph(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw Error("DirectedGraph: at least one node required");
  std::set<std::string> seen(labels_.begin(), labels_.end());
  if (seen.size() != labels_.size()) throw Error("DirectedGraph: duplicate node label");
  adj_.assign(labels_.size() * labels_.size(), 0);
}

DirectedGraph::DirectedGraph(std::vector<std::string> labels,
                             const std::vector<std::pair<std::string, std::string>>& edges)
    : DirectedGraph(std::move(labels)) {
  for (const auto& [from, to] : edges) add_edge(from, to);
}

std::size_t DirectedGraph::index_of(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw Error(fmt::format("unknown node '{}'", label));
  return static_cast<std::size_t>(it - labels_.begin());
}

void DirectedGraph::add_edge(std::size_t from, std::size_t to) {
  if (from >= size() || to >= size()) throw Error("add_edge: node index out of range");
  if (from == to) throw Error("add_edge: self-loops are not allowed");
  adj_[from * size() + to] = 1;
}

void DirectedGraph::add_edge(std::string_view from, std::string_view to) {
  add_edge(index_of(from), index_of(to));
}

std::size_t DirectedGraph::edge_count() const {
  return static_cast<std::size_t>(std::count(adj_.begin(), adj_.end(), 1));
}

std::vector<std::size_t> DirectedGraph::parents(std::size_t node) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i)
    if (has_edge(i, node)) out.push_back(i);
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> DirectedGraph::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < size(); ++j)
      if (has_edge(i, j)) out.emplace_back(i, j);
  return out;
}

namespace {

// Kahn's algorithm; returns a partial order when the graph has a cycle.
std::vector<std::size_t> kahn(const DirectedGraph& g) {
  const std::size_t d = g.size();
  std::vector<std::size_t> indegree(d, 0);
  for (auto [i, j] : g.edges()) ++indegree[j];
  std::vector<std::size_t> order;
  order.reserve(d);
  std::vector<char> done(d, 0);
  // Smallest ready index first, so the order is canonical.
  while (order.size() < d) {
    std::size_t next = d;
    for (std::size_t i = 0; i < d; ++i)
      if (!done[i] && indegree[i] == 0) {
        next = i;
        break;
      }
    if (next == d) break;
    done[next] = 1;
    order.push_back(next);
    for (std::size_t j = 0; j < d; ++j)
      if (g.has_edge(next, j)) --indegree[j];
  }
  return order;
}

void require_comparable(const DirectedGraph& a, const DirectedGraph& b) {
  if (a.labels() != b.labels()) throw Error("graphs are incomparable: node labels differ");
}

}  // namespace

bool is_acyclic(const DirectedGraph& g) { return kahn(g).size() == g.size(); }

std::vector<std::size_t> topological_order(const DirectedGraph& g) {
  auto order = kahn(g);
  if (order.size() != g.size()) throw Error("topological_order: graph has a cycle");
  return order;
}

std::size_t shd(const DirectedGraph& inferred, const DirectedGraph& truth) {
  require_comparable(inferred, truth);
  // Edits on different node pairs are independent, so the distance is a sum over pairs.
  // Per pair the states are {none, i->j, j->i, both}; only none <-> both needs two edits.
  std::size_t total = 0;
  const std::size_t d = truth.size();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const int a = (inferred.has_edge(i, j) ? 1 : 0) | (inferred.has_edge(j, i) ? 2 : 0);
      const int b = (truth.has_edge(i, j) ? 1 : 0) | (truth.has_edge(j, i) ? 2 : 0);
      if (a == b) continue;
      total += ((a == 0 && b == 3) || (a == 3 && b == 0)) ? 2 : 1;
    }
  }
  return total;
}

double precision(const DirectedGraph& inferred, const DirectedGraph& truth) {
  require_comparable(inferred, truth);
  std::size_t tp = 0, fp = 0;
  for (auto [i, j] : inferred.edges()) (truth.has_edge(i, j) ? tp : fp) += 1;
  if (tp + fp == 0) return truth.edge_count() == 0 ? 1.0 : 0.0;
  return static_cast<double>(tp) / static_cast<double>(tp + fp);
}

std::string to_edge_list(const DirectedGraph& g) {
  std::string out = "nodes:";
  for (const auto& l : g.labels()) out += " " + l;
  out += "\n";
  for (auto [i, j] : g.edges()) out += fmt::format("{} -> {}\n", g.labels()[i], g.labels()[j]);
  return out;
}

DirectedGraph parse_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<std::string> labels;
  bool have_nodes = false;
  DirectedGraph g;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (!have_nodes) {
      if (line.rfind("nodes:", 0) != 0) throw Error("edge list: missing 'nodes:' header");
      std::istringstream ls(line.substr(6));
      for (std::string l; ls >> l;) labels.push_back(l);
      g = DirectedGraph(labels);
      have_nodes = true;
      continue;
    }
    const auto arrow = line.find(" -> ");
    if (arrow == std::string::npos) throw Error(fmt::format("edge list: bad line '{}'", line));
    g.add_edge(line.substr(0, arrow), line.substr(arrow + 4));
  }
  if (!have_nodes) throw Error("edge list: empty input");
  return g;
}

}  // namespace crl

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace crl {

/// Dense directed graph over labelled nodes. Entry (i, j) set means edge i -> j.
class DirectedGraph {
 public:
  DirectedGraph() = default;
  explicit DirectedGraph(std::vector<std::string> labels);
  DirectedGraph(std::vector<std::string> labels,
                const std::vector<std::pair<std::string, std::string>>& edges);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t index_of(std::string_view label) const;

  bool has_edge(std::size_t from, std::size_t to) const { return adj_[from * size() + to] != 0; }
  void add_edge(std::size_t from, std::size_t to);
  void add_edge(std::string_view from, std::string_view to);
  void remove_edge(std::size_t from, std::size_t to) { adj_[from * size() + to] = 0; }

  std::size_t edge_count() const;
  std::vector<std::size_t> parents(std::size_t node) const;
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

  bool operator==(const DirectedGraph&) const = default;

 private:
  std::vector<std::string> labels_;
  std::vector<char> adj_;
};

bool is_acyclic(const DirectedGraph& g);

/// Node indices in a topological order. Throws for cyclic graphs.
std::vector<std::size_t> topological_order(const DirectedGraph& g);

/// Structural Hamming distance: the minimum number of edge insertions, deletions and
/// reversals turning `inferred` into `truth`. A reversal costs one edit.
std::size_t shd(const DirectedGraph& inferred, const DirectedGraph& truth);

/// Fraction of inferred directed edges that appear in `truth` with the same orientation.
/// Empty inferred graph: 1 when truth is also empty, otherwise 0.
double precision(const DirectedGraph& inferred, const DirectedGraph& truth);

/// Edge-list text form:
///   nodes: a b c
///   a -> b
std::string to_edge_list(const DirectedGraph& g);
DirectedGraph parse_edge_list(std::string_view text);

}  // namespace crl

#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mis {

/// Vertices are numbered 1..n everywhere outside the internals of this file.
using VertexId = int;

/// An unordered vertex pair with `u < v` after normalization.
struct Edge {
  VertexId u;
  VertexId v;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Sorted, duplicate-free set of 1-based vertex ids.
class VertexSet {
 public:
  VertexSet() = default;
  VertexSet(std::initializer_list<VertexId> ids);
  explicit VertexSet(std::vector<VertexId> ids);

  bool contains(VertexId v) const;
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  void insert(VertexId v);
  void erase(VertexId v);

  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }
  const std::vector<VertexId>& ids() const { return ids_; }

  /// "3,4,7,22"
  std::string to_string() const;
  /// Parses "3,4,7,22" (whitespace tolerated, empty string is the empty set).
  static VertexSet parse(std::string_view text);

  friend bool operator==(const VertexSet&, const VertexSet&) = default;

 private:
  std::vector<VertexId> ids_;
};

/// Undirected simple graph. Immutable after construction; edges are stored
/// normalized (u < v), sorted and deduplicated.
class Graph {
 public:
  Graph() = default;
  /// Throws PreconditionError on self-loops or out-of-range endpoints.
  /// Duplicate pairs (in either orientation) collapse silently.
  Graph(int n, std::vector<Edge> edges);

  int n() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }

  bool adjacent(VertexId a, VertexId b) const;
  int degree(VertexId v) const;
  /// Adjacency row of 0-based vertex i as 64-bit words (bit j = vertex j+1).
  std::span<const std::uint64_t> row(int i) const {
    return {adjacency_.data() + static_cast<std::size_t>(i) * words_, words_};
  }
  std::size_t words() const { return words_; }

  /// Number of pairs removed as duplicates when the graph was built.
  std::size_t duplicates_dropped() const { return duplicates_; }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> adjacency_;
  std::size_t duplicates_ = 0;
};

struct ParsedGraph {
  Graph graph;
  std::vector<std::string> warnings;
};

/// AMPL-style list: a vertex-count declaration ("n=25;" or "param N := 25;"),
/// an optional "set Edges :=", pairs "(i, j)" in any spacing, then ";".
/// '#' starts a comment.
ParsedGraph parse_edge_list(std::string_view text);

/// DIMACS edge format: "c" comments, "p edge N M" (or "p col"), "e i j".
ParsedGraph parse_dimacs(std::string_view text);

/// Picks the reader from the first significant token ("p"/"c" => DIMACS).
ParsedGraph parse_graph(std::string_view text);
ParsedGraph read_graph_file(const std::string& path);

/// Canonical DIMACS emission: header then sorted "e i j" lines with i < j.
std::string emit_dimacs(const Graph& g);

/// Each unordered pair (i, j), i < j, visited in lexicographic order, is kept
/// iff the next SplitMix64(seed) uniform draw is < p.
Graph random_graph(int n, double p, std::uint64_t seed);

/// Throws PreconditionError if a member is outside 1..n.
bool is_independent(const Graph& g, const VertexSet& s);

/// Minimum-degree greedy independent set (ties broken by smallest id).
VertexSet greedy_independent_set(const Graph& g);

/// FNV-1a 64 over the canonical DIMACS emission, as 16 hex digits.
std::string graph_digest(const Graph& g);

}  // namespace mis

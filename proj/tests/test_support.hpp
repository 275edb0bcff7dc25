#pragma once

#include <string>

#include "mis/graph.hpp"

namespace mis::test {

inline std::string data(const std::string& name) { return std::string(MIS_TEST_DATA) + name; }

inline Graph appendix_b() { return read_graph_file(data("appendixB.graph")).graph; }

/// Exhaustive independence number; only for n <= ~20.
inline int brute_force_alpha(const Graph& g) {
  const int n = g.n();
  std::vector<std::uint32_t> adj(n, 0);
  for (const auto& e : g.edges()) {
    adj[e.u - 1] |= 1u << (e.v - 1);
    adj[e.v - 1] |= 1u << (e.u - 1);
  }
  int best = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const int size = __builtin_popcount(mask);
    if (size <= best) continue;
    bool ok = true;
    for (int i = 0; i < n && ok; ++i)
      if ((mask >> i & 1u) && (adj[i] & mask)) ok = false;
    if (ok) best = size;
  }
  return best;
}

}  // namespace mis::test

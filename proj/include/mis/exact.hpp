#pragma once

#include <cstdint>

#include "mis/graph.hpp"

namespace mis {

struct ExactResult {
  enum class Status { optimal, unknown };
  Status status = Status::optimal;
  /// Optimum when status is optimal; otherwise the best size found before the
  /// budget ran out (a lower bound only).
  int alpha = 0;
  VertexSet witness;
  std::uint64_t nodes = 0;

  bool optimal() const { return status == Status::optimal; }
};

inline constexpr std::uint64_t kDefaultExactBudget = 50'000'000;

/// Maximum independent set by branch and bound: maximum clique in the
/// complement with a greedy-colouring bound. Single 64-bit words are used per
/// adjacency row when n <= 64, multi-word rows beyond. `budget` caps the number
/// of search nodes; exhausting it yields Status::unknown, never a wrong answer.
ExactResult exact_mis(const Graph& g, std::uint64_t budget = kDefaultExactBudget);

}  // namespace mis

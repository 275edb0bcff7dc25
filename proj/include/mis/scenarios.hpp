#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mis/costfn.hpp"

namespace mis::cost {

/// Placement-level constants derived from (N, k, w).
struct ScenarioQuantities {
  int N = 0;
  int k = 0;
  double w = 0;

  /// w (N - k) / N + k / N: every bin gets the same share of the total weight.
  double equal_wt() const;
  /// (N - k) w / (N - m k): the leftover weight spread over the bins not used
  /// by m k pieces of size 1/m. Absent unless N > m k.
  std::optional<double> nkw(int m) const;
};

inline constexpr int kNkwPieces[] = {12, 8, 6, 5, 4, 3, 2};
inline constexpr double kTwoPieceSplits[] = {0.001, 0.01, 0.02, 0.05, 0.15, 0.3};
inline constexpr int kEqualSplits[] = {2, 3, 4, 5, 10, 20, 100, 1000};

enum class ScenarioKind {
  equal_weight,  // N bins of equal_wt
  redistribute,  // Nkw_m
  two_piece,     // V(a): a unit item split into a and 1 - a
  equal_split,   // W(m): a unit item split into m equal parts
  eight_piece,   // 8 f((1 + 7w)/8) against f(1) + 7 f(w)
  half_split,    // 2 f((1 + w)/2) against f(1) + f(w)
};

struct ScenarioOptions {
  bool tightened = false;  // shifted V/W forms that keep the floor in every bin
  bool extra150 = false;   // the eight-piece and half-split rows
  /// Keep only Nkw4Diff, Nkw3Diff, Nkw2Diff, W3 and V0199 (experiment flag).
  bool subset = false;
};

/// One breakup: `cost` is the non-integer placement, compared against either
/// desiredCost or func1 + floors * funcW.
struct Scenario {
  ScenarioKind kind{};
  int m = 0;       // pieces for redistribute / equal_split
  double a = 0;    // first piece for two_piece
  bool shifted = false;
  std::string name;      // difference variable, e.g. "Nkw2Diff", "W3", "V0199"
  std::string cost_var;  // auxiliary holding the placement cost
  std::string row;       // margin row, e.g. "break_into_2_pieces"
  Placement cost;
  bool against_desired = false;  // otherwise against func1 + floors * funcW
  int floors = 0;
  double margin_scale = 1.0;  // multiplies eps
  bool active = false;
  std::string guard;  // human-readable activation predicate
};

/// Every scenario for (N, k, w) under the given options, active or not, in a
/// fixed order: equal weight, Nkw12..Nkw2, V family, W family, extras.
std::vector<Scenario> enumerate_scenarios(const ScenarioQuantities& q, const ScenarioOptions& opts);

/// Total cost of the scenario's placement. Throws PreconditionError for an
/// inactive scenario whose placement is undefined (N <= m k).
double scenario_cost(const CostParams& params, const Scenario& s);
/// The value the placement is compared against.
double scenario_reference(const CostParams& params, const ScenarioQuantities& q, const Scenario& s);

}  // namespace mis::cost

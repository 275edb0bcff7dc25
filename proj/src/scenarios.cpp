#include <algorithm>
#include <cstdio>
#include <set>

#include "mis/errors.hpp"
#include "mis/scenarios.hpp"

namespace mis::cost {
namespace {

// Activation thresholds exactly as printed with the original model; they
// are the piece sizes rounded, so e.g. 1/12 appears as 0.083333.
double nkw_guard(int m) {
  switch (m) {
    case 12: return 0.083333;
    case 8: return 0.125;
    case 6: return 0.16667;
    case 5: return 0.2;
    case 4: return 0.25;
    case 3: return 0.3333;
    case 2: return 0.5;
  }
  return 1.0 / m;
}

double split_guard(int m) { return m == 3 ? 0.33333 : 1.0 / m; }

const char* split_word(int m) {
  switch (m) {
    case 2: return "two";
    case 3: return "three";
    case 4: return "four";
    case 5: return "five";
    case 10: return "ten";
    case 20: return "twenty";
    case 100: return "hundred";
    case 1000: return "thousand";
  }
  return "many";
}

// 0.001 -> "001_999", 0.15 -> "15_85", 0.3 -> "3_7": the digits after the
// decimal point of a and 1 - a.
std::string split_digits(double a) {
  auto digits = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s(buf + 2);
    while (s.size() > 1 && s.back() == '0') s.pop_back();
    return s;
  };
  return digits(a) + "_" + digits(1.0 - a);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

Scenario make_scenario(ScenarioKind kind, int m = 0) {
  Scenario s;
  s.kind = kind;
  s.m = m;
  return s;
}

}  // namespace

double ScenarioQuantities::equal_wt() const { return w * (N - k) / N + static_cast<double>(k) / N; }

std::optional<double> ScenarioQuantities::nkw(int m) const {
  if (N <= m * k) return std::nullopt;
  return (N - k) * w / (N - m * k);
}

std::vector<Scenario> enumerate_scenarios(const ScenarioQuantities& q, const ScenarioOptions& opts) {
  if (q.N < 1 || q.k < 0 || q.k > q.N) throw PreconditionError("scenarios need N >= 1 and 0 <= k <= N");
  const double w = q.w;
  std::vector<Scenario> out;

  {
    Scenario s = make_scenario(ScenarioKind::equal_weight);
    s.name = "equalWeightDiff";
    s.cost_var = "equalWtTotalCost";
    s.row = "break_6_pieces_6inverse_plus_w";
    s.cost.pieces = {{double(q.N), q.equal_wt()}};
    s.against_desired = true;
    s.active = true;
    s.guard = "always";
    out.push_back(std::move(s));
  }

  for (int m : kNkwPieces) {
    Scenario s = make_scenario(ScenarioKind::redistribute, m);
    const std::string ms = std::to_string(m);
    s.name = "Nkw" + ms + "Diff";
    s.cost_var = "Nkw" + ms + "Cost";
    s.row = "break_into_" + ms + "_pieces";
    s.against_desired = true;
    const auto nkw = q.nkw(m);
    s.guard = "N > " + ms + "k and Nkw" + ms + " <= 1 and " + fmt(nkw_guard(m)) + " >= w";
    s.active = nkw && *nkw <= 1.0 && nkw_guard(m) >= w;
    if (nkw) s.cost.pieces = {{double(q.N - m * q.k), *nkw}, {double(m * q.k), 1.0 / m}};
    out.push_back(std::move(s));
  }

  for (double a : kTwoPieceSplits) {
    Scenario s = make_scenario(ScenarioKind::two_piece);
    s.a = a;
    s.shifted = opts.tightened;
    const std::string d = split_digits(a);
    std::string compact = d;
    std::erase(compact, '_');
    s.name = "V" + compact;
    s.cost_var = s.name + "Cost";
    s.row = "break_into_" + d + "B";
    const double shift = opts.tightened ? w / 2 : 0.0;
    s.cost.pieces = {{1.0, a + shift}, {1.0, 1.0 - a + shift}};
    s.floors = opts.tightened ? 1 : 0;
    s.active = a >= w;
    s.guard = fmt(a) + " >= w";
    out.push_back(std::move(s));
  }

  for (int m : kEqualSplits) {
    Scenario s = make_scenario(ScenarioKind::equal_split, m);
    s.shifted = opts.tightened;
    s.name = "W" + std::to_string(m);
    s.cost_var = s.name + "Cost";
    s.row = std::string(split_word(m)) + "_pieces_noEmptyBinsB";
    // Exact piece size 1/m; the shifted form spreads (m - 1) floors over the pieces.
    const double piece = opts.tightened ? 1.0 / m + (m - 1) * w / m : 1.0 / m;
    s.cost.pieces = {{double(m), piece}};
    s.floors = opts.tightened ? m - 1 : 0;
    s.guard = fmt(split_guard(m)) + " >= w";
    s.active = split_guard(m) >= w;
    if (opts.tightened && m == 1000) {
      s.active = false;
      s.guard = "not used with the shifted forms";
    }
    out.push_back(std::move(s));
  }

  if (opts.extra150) {
    Scenario eight = make_scenario(ScenarioKind::eight_piece, 8);
    eight.name = "EightPieceDiff";
    eight.cost_var = "EightPieceCost";
    eight.row = "eight_pieces_with_floor";
    eight.cost.pieces = {{8.0, (1.0 + 7.0 * w) / 8.0}};
    eight.floors = 7;
    eight.active = true;
    eight.guard = "always";
    out.push_back(std::move(eight));

    Scenario half = make_scenario(ScenarioKind::half_split, 2);
    half.name = "HalfSplitDiff";
    half.cost_var = "HalfSplitCost";
    half.row = "two_pieces_with_floor";
    half.cost.pieces = {{2.0, 0.5 + 0.5 * w}};
    half.floors = 1;
    half.margin_scale = 1.5;
    half.active = true;
    half.guard = "always";
    out.push_back(std::move(half));
  }

  if (opts.subset) {
    static const std::set<std::string> keep{"Nkw4Diff", "Nkw3Diff", "Nkw2Diff", "W3", "V0199"};
    for (auto& s : out)
      if (!keep.count(s.name)) {
        s.active = false;
        s.guard = "dropped in subset mode";
      }
  }
  return out;
}

double scenario_cost(const CostParams& params, const Scenario& s) {
  if (s.cost.pieces.empty()) throw PreconditionError("scenario " + s.name + " has no placement (" + s.guard + ")");
  return static_cast<double>(s.cost.cost(params));
}

double scenario_reference(const CostParams& params, const ScenarioQuantities& q, const Scenario& s) {
  if (s.against_desired) return desired_cost(params, q.N, q.k);
  const Placement ref{{{1.0, 1.0}, {double(s.floors), floor_size(params)}}};
  return static_cast<double>(ref.cost(params));
}

}  // namespace mis::cost

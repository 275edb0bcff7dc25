#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mis/costfn.hpp"
#include "mis/kvfile.hpp"
#include "mis/lp.hpp"
#include "mis/scenarios.hpp"

namespace mis::fit {

enum class Objective { feasibility, maximize_f1 };

/// Inputs of the coefficient-fitting LP. The floor size is never set
/// directly: w = lowCurv / intvl.
struct FitConfig {
  int N = 25;
  int k = 4;
  long long intvl = 100000;
  double eps = 30;
  long long lowCurv = 500;
  double curv_lower_bound = 1e-8;

  cost::Family family = cost::Family::poly;
  bool tightened = false;
  bool extra150 = false;
  bool ratio_eps = false;
  bool subset = false;
  /// Curvature rows on [w, 1]. Off reproduces the runs that "did not use
  /// constraints that enforce convexity".
  bool convexity = true;
  int curvature_points = 2000;
  bool full_curvature_grid = false;

  Objective objective = Objective::maximize_f1;
  double f1_cap = 1e10;
  /// The optimal face of the fitting LP is usually not a single point. With
  /// this on, a second LP picks the optimum with the least L1 norm over the
  /// shape coefficients (everything but C), so the fit does not depend on
  /// which vertex the simplex happens to reach first.
  bool l1_tie_break = true;

  double w() const { return static_cast<double>(lowCurv) / static_cast<double>(intvl); }
  cost::ScenarioQuantities quantities() const { return {N, k, w()}; }
  cost::ScenarioOptions scenario_options() const { return {tightened, extra150, subset}; }

  /// Throws PreconditionError describing the first invalid field.
  void validate() const;

  /// Same config at floor size w: intvl is raised to a power of ten fine
  /// enough to hold w exactly (up to 1e9), lowCurv follows.
  FitConfig with_w(double w) const;
  FitConfig with_k(int k) const;

  /// Keys: N, k, intvl, eps, lowCurv, curv_lower_bound, family, tightened,
  /// extra150, ratio_eps, subset, convexity, curvature_points,
  /// full_curvature_grid, objective (feasibility | max_f1), f1_cap,
  /// tie_break (l1 | none).
  static FitConfig from_kv(const KvFile& kv);
  static FitConfig read(const std::string& path);
  std::string to_kv() const;
};

/// The built LP plus the bookkeeping needed to read it back.
struct FitModel {
  lp::LinearProgram lp;
  cost::Family family = cost::Family::poly;
  cost::ScenarioQuantities quantities;
  std::vector<int> coef_vars;
  int func1 = -1, funcW = -1, desired = -1;
  std::vector<cost::Scenario> scenarios;  // active ones only, in row order
  std::vector<double> curvature_grid;     // x values of the curvature rows
};

/// Curvature sample points in [w, 1]: every f/intvl for f in lowCurv..intvl
/// in full-grid mode, otherwise `curvature_points` indices spread evenly.
std::vector<double> curvature_grid(const FitConfig& cfg);

FitModel build_fit_lp(const FitConfig& cfg);

/// Full LP point for given parameters: coefficient columns from `params`,
/// every auxiliary column by exact evaluation of its defining expression.
/// Used to check printed parameter sets against a built model.
std::vector<double> complete_point(const FitModel& model, const cost::CostParams& params);

struct RowCheck {
  std::string name;
  double value = 0;     // achieved difference (or curvature)
  double required = 0;  // its lower limit
  double slack = 0;     // value - required
};

struct VerifyReport {
  std::vector<RowCheck> checked;
  std::vector<RowCheck> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

/// Re-evaluates every active margin row (and the curvature rows when the
/// config enables them) directly through costfn, independent of the LP. A
/// row is violated when value < required - tol * max(1, |required|) minus a
/// floating-point rounding allowance for the terms involved.
VerifyReport verify_parameters(const cost::CostParams& params, const FitConfig& cfg, double tol = 1e-6);

struct FitReport {
  lp::Status lp_status = lp::Status::infeasible;
  std::optional<cost::CostParams> params;
  double func1 = 0, funcW = 0, desiredCost = 0;
  std::map<std::string, double> slacks;  // per active margin row
  std::optional<cost::ConvexityMeasure> convexity;  // over [w, 1]
  /// Every row re-evaluated exactly (tol 0, rounding allowance only).
  VerifyReport verification;
  int iterations = 0;
  int rows = 0, columns = 0;
  /// Extra eps the LP was solved with so that exact re-evaluation clears
  /// the requested eps (0 when the first solve verified clean).
  double margin_boost = 0;
  double seconds = 0;

  bool ok() const { return params.has_value(); }
  std::string to_text() const;
};

FitReport fit_parameters(const FitConfig& cfg, const lp::SolveOptions& opts = {});

// ---------------------------------------------------------------------------
// Grid search over the legacy family.

struct LegacyCheck {
  std::string name;
  bool pass = false;
  double margin = 0;  // costlier side minus the integer side
};

/// The twelve breakup requirements for (N, k) (size-dependent ones only when
/// N is large enough) plus the empty-bin condition, with empty bins costing
/// f(0).
std::vector<LegacyCheck> legacy_requirements(const cost::LegacyParams& params, int N, int k);

struct LegacyGrid {
  std::vector<double> p, t, M, r, s, w, y;
  int N = 18;
  int k = 6;
  int convexity_subintervals = 1000;
  std::size_t budget = 10'000'000;  // grid points evaluated at most
  unsigned jobs = 1;
};

struct LegacyCandidate {
  cost::LegacyParams params;
  cost::ConvexityMeasure convexity;
  std::vector<LegacyCheck> checks;
};

struct LegacySearchResult {
  std::vector<LegacyCandidate> accepted;  // grid order
  std::size_t evaluated = 0;
  std::size_t domain_skipped = 0;
  bool budget_exhausted = false;
};

/// Geometric ladder start * ratio^i for i in 0..count-1.
std::vector<double> geometric_grid(double start, double ratio, int count);

LegacySearchResult grid_search_legacy(const LegacyGrid& grid);

}  // namespace mis::fit

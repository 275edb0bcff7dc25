#include "mis/paramfit.hpp"

#include <algorithm>
#include <cfloat>
#include <chrono>
#include <cmath>
#include <sstream>

#include "mis/errors.hpp"

namespace mis::fit {
namespace {

using cost::Family;
using cost::Placement;
using lp::kInf;
using lp::Relation;
using lp::Term;

// Coefficient row of sum_i c_i * (sum over pieces of count * phi_i(x)).
std::vector<Term> placement_terms(const FitModel& m, const Placement& pl) {
  const std::size_t nc = m.coef_vars.size();
  std::vector<long double> acc(nc, 0.0L);
  for (const auto& [count, x] : pl.pieces) {
    const auto basis = cost::value_basis(m.family, x);
    for (std::size_t i = 0; i < nc; ++i) acc[i] += count * basis[i];
  }
  std::vector<Term> out;
  for (std::size_t i = 0; i < nc; ++i) out.push_back({m.coef_vars[i], static_cast<double>(acc[i])});
  return out;
}

// Placement-cost difference against the scenario's reference, as one
// compensated sum so the large common parts cancel exactly.
Placement difference_placement(const cost::Scenario& s, const cost::ScenarioQuantities& q) {
  Placement diff = s.cost;
  if (s.against_desired) {
    diff.pieces.push_back({-double(q.k), 1.0});
    diff.pieces.push_back({-double(q.N - q.k), q.w});
  } else {
    diff.pieces.push_back({-1.0, 1.0});
    diff.pieces.push_back({-double(s.floors), q.w});
  }
  return diff;
}

long double magnitude(const Placement& pl, const cost::CostParams& params) {
  long double total = 0;
  for (const auto& [count, x] : pl.pieces) total += std::fabs(count * cost::eval_ld(params, x));
  return total;
}

bool parse_bool(const KvFile& kv, const std::string& key, bool fallback) { return kv.flag(key, fallback); }

}  // namespace

void FitConfig::validate() const {
  auto fail = [](const std::string& msg) { throw PreconditionError("fit config: " + msg); };
  if (N < 1) fail("N must be positive");
  if (k < 1 || k > N) fail("k must lie in 1..N");
  if (intvl < 1) fail("intvl must be positive");
  if (lowCurv < 1 || lowCurv >= intvl) fail("lowCurv must lie in 1..intvl-1 so that 0 < w < 1");
  if (!(eps > 0)) fail("eps must be positive");
  if (!(curv_lower_bound > 0)) fail("curv_lower_bound must be positive");
  if (curvature_points < 2) fail("curvature_points must be at least 2");
  if (family == Family::legacy) fail("the legacy family is fitted by grid search, not by LP");
  if (!(f1_cap > 0) || !std::isfinite(f1_cap)) fail("f1_cap must be positive and finite");
}

FitConfig FitConfig::with_w(double w) const {
  if (!(w > 0 && w < 1)) throw PreconditionError("floor size w must lie in (0, 1)");
  FitConfig out = *this;
  long long scale = 1;
  for (int d = 0; d <= 9; ++d, scale *= 10) {
    const double scaled = w * static_cast<double>(scale);
    if (std::abs(scaled - std::round(scaled)) <= 1e-9 * std::max(1.0, scaled)) break;
  }
  if (scale > 1'000'000'000LL) scale = 1'000'000'000LL;
  out.intvl = std::max(intvl, scale);
  out.lowCurv = std::llround(w * static_cast<double>(out.intvl));
  if (out.lowCurv < 1) out.lowCurv = 1;
  return out;
}

FitConfig FitConfig::with_k(int new_k) const {
  FitConfig out = *this;
  out.k = new_k;
  return out;
}

FitConfig FitConfig::from_kv(const KvFile& kv) {
  static const char* known[] = {"N", "k", "intvl", "eps", "lowCurv", "curv_lower_bound", "family", "tightened",
                                "extra150", "ratio_eps", "subset", "convexity", "curvature_points",
                                "full_curvature_grid", "objective", "f1_cap", "tie_break"};
  for (const auto& [key, value] : kv.entries())
    if (std::find(std::begin(known), std::end(known), key) == std::end(known))
      throw ParseError(0, "unknown config key '" + key + "'");
  FitConfig c;
  c.N = static_cast<int>(kv.integer("N"));
  c.k = static_cast<int>(kv.integer("k"));
  c.intvl = kv.integer("intvl", c.intvl);
  c.eps = kv.number("eps", c.eps);
  c.lowCurv = kv.integer("lowCurv", c.lowCurv);
  c.curv_lower_bound = kv.number("curv_lower_bound", c.curv_lower_bound);
  c.family = cost::parse_family(kv.get("family").value_or("poly"));
  c.tightened = parse_bool(kv, "tightened", c.tightened);
  c.extra150 = parse_bool(kv, "extra150", c.extra150);
  c.ratio_eps = parse_bool(kv, "ratio_eps", c.ratio_eps);
  c.subset = parse_bool(kv, "subset", c.subset);
  c.convexity = parse_bool(kv, "convexity", c.convexity);
  c.curvature_points = static_cast<int>(kv.integer("curvature_points", c.curvature_points));
  c.full_curvature_grid = parse_bool(kv, "full_curvature_grid", c.full_curvature_grid);
  const std::string obj = kv.get("objective").value_or("max_f1");
  if (obj == "max_f1")
    c.objective = Objective::maximize_f1;
  else if (obj == "feasibility")
    c.objective = Objective::feasibility;
  else
    throw ParseError(0, "objective must be max_f1 or feasibility");
  c.f1_cap = kv.number("f1_cap", c.f1_cap);
  const std::string tie = kv.get("tie_break").value_or("l1");
  if (tie != "l1" && tie != "none") throw ParseError(0, "tie_break must be l1 or none");
  c.l1_tie_break = tie == "l1";
  try {
    c.validate();
  } catch (const PreconditionError& e) {
    throw ParseError(0, e.what());
  }
  return c;
}

FitConfig FitConfig::read(const std::string& path) {
  const KvFile kv = KvFile::read(path);
  try {
    return from_kv(kv);
  } catch (const ParseError& e) {
    throw ParseError(0, path + ": " + e.message());
  }
}

std::string FitConfig::to_kv() const {
  std::ostringstream out;
  out << "N = " << N << "\nk = " << k << "\nintvl = " << intvl << "\neps = " << format_double(eps)
      << "\nlowCurv = " << lowCurv << "\ncurv_lower_bound = " << format_double(curv_lower_bound)
      << "\nfamily = " << cost::to_string(family) << "\ntightened = " << tightened << "\nextra150 = " << extra150
      << "\nratio_eps = " << ratio_eps << "\nsubset = " << subset << "\nconvexity = " << convexity
      << "\ncurvature_points = " << curvature_points << "\nfull_curvature_grid = " << full_curvature_grid
      << "\nobjective = " << (objective == Objective::maximize_f1 ? "max_f1" : "feasibility")
      << "\nf1_cap = " << format_double(f1_cap) << "\ntie_break = " << (l1_tie_break ? "l1" : "none") << "\n";
  return out.str();
}

std::vector<double> curvature_grid(const FitConfig& cfg) {
  const long long count = cfg.intvl - cfg.lowCurv + 1;
  std::vector<long long> idx;
  if (cfg.full_curvature_grid || count <= cfg.curvature_points) {
    for (long long f = cfg.lowCurv; f <= cfg.intvl; ++f) idx.push_back(f);
  } else {
    const int pts = cfg.curvature_points;
    for (int i = 0; i < pts; ++i)
      idx.push_back(cfg.lowCurv + std::llround(static_cast<double>(i) * (count - 1) / (pts - 1)));
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  }
  std::vector<double> out;
  out.reserve(idx.size());
  for (long long f : idx) out.push_back(static_cast<double>(f) / static_cast<double>(cfg.intvl));
  return out;
}

FitModel build_fit_lp(const FitConfig& cfg) {
  cfg.validate();
  FitModel m;
  m.family = cfg.family;
  m.quantities = cfg.quantities();
  auto& lp = m.lp;
  const double w = cfg.w();
  const auto q = cfg.quantities();

  for (const auto& name : cost::coefficient_names(cfg.family)) m.coef_vars.push_back(lp.add_variable(name, -kInf, kInf));
  m.func1 = lp.add_variable("func1", -kInf, kInf);
  m.funcW = lp.add_variable("funcW", -kInf, kInf);
  m.desired = lp.add_variable("desiredCost", -kInf, kInf);

  lp.add_constraint("func1Limit", {{m.func1, 1.0}}, Relation::le, cfg.f1_cap);
  {
    auto t = placement_terms(m, Placement{{{1.0, w}}});
    t.push_back({m.funcW, -1.0});
    lp.add_constraint("funcW_def", std::move(t), Relation::eq, 0.0);
  }
  {
    auto t = placement_terms(m, Placement{{{1.0, 1.0}}});
    t.push_back({m.func1, -1.0});
    lp.add_constraint("func1_def", std::move(t), Relation::eq, 0.0);
  }
  lp.add_constraint("desiredFuncvalueDef",
                    {{m.func1, double(cfg.k)}, {m.funcW, double(cfg.N - cfg.k)}, {m.desired, -1.0}}, Relation::eq,
                    0.0);
  if (cfg.ratio_eps) lp.add_constraint("desiredCostPositive", {{m.desired, 1.0}}, Relation::ge, 1.0);

  for (auto& s : cost::enumerate_scenarios(q, cfg.scenario_options())) {
    if (!s.active) continue;
    const int cv = lp.add_variable(s.cost_var, -kInf, kInf);
    const int dv = lp.add_variable(s.name, -kInf, kInf);
    auto t = placement_terms(m, s.cost);
    t.push_back({cv, -1.0});
    lp.add_constraint(s.cost_var + "_def", std::move(t), Relation::eq, 0.0);

    std::vector<Term> diff{{cv, 1.0}, {dv, -1.0}};
    if (s.against_desired) {
      diff.push_back({m.desired, -1.0});
    } else {
      diff.push_back({m.func1, -1.0});
      if (s.floors) diff.push_back({m.funcW, -double(s.floors)});
    }
    lp.add_constraint(s.name + "_def", std::move(diff), Relation::eq, 0.0);

    const double need = s.margin_scale * cfg.eps;
    if (cfg.ratio_eps)
      lp.add_constraint(s.row, {{dv, 1.0}, {m.desired, -need}}, Relation::ge, 0.0);
    else
      lp.add_constraint(s.row, {{dv, 1.0}}, Relation::ge, need);
    m.scenarios.push_back(std::move(s));
  }

  if (cfg.convexity) {
    m.curvature_grid = curvature_grid(cfg);
    for (double x : m.curvature_grid) {
      const auto basis = cost::second_derivative_basis(cfg.family, x);
      std::vector<Term> t;
      for (std::size_t i = 0; i < m.coef_vars.size(); ++i)
        t.push_back({m.coef_vars[i], static_cast<double>(basis[i])});
      const long long f = std::llround(x * static_cast<double>(cfg.intvl));
      lp.add_constraint("curvature_condition[" + std::to_string(f) + "]", std::move(t), Relation::ge,
                        cfg.curv_lower_bound);
    }
  }

  if (cfg.objective == Objective::maximize_f1)
    lp.set_objective(lp::Sense::maximize, {{m.func1, 1.0}});
  else
    lp.set_objective(lp::Sense::minimize, {});
  return m;
}

std::vector<double> complete_point(const FitModel& m, const cost::CostParams& params) {
  if (cost::family_of(params) != m.family) throw PreconditionError("parameter family does not match the model");
  std::vector<double> x(m.lp.num_variables(), 0.0);
  const auto coefs = cost::coefficients(params);
  for (std::size_t i = 0; i < m.coef_vars.size(); ++i) x[m.coef_vars[i]] = coefs[i];

  // Evaluated at the model's floor, not the params' w, so a mismatch shows
  // up as violated rows.
  const auto& lp = m.lp;
  const auto& q = m.quantities;
  const auto at_w = cost::with_floor(params, q.w);
  x[m.func1] = cost::eval(at_w, 1.0);
  x[m.funcW] = cost::eval(at_w, q.w);
  x[m.desired] = static_cast<double>(Placement{{{double(q.k), 1.0}, {double(q.N - q.k), q.w}}}.cost(at_w));

  for (const auto& s : m.scenarios) {
    x[lp.variable_index(s.cost_var)] = static_cast<double>(s.cost.cost(at_w));
    x[lp.variable_index(s.name)] = static_cast<double>(difference_placement(s, q).cost(at_w));
  }
  return x;
}

VerifyReport verify_parameters(const cost::CostParams& params, const FitConfig& cfg, double tol) {
  cfg.validate();
  if (cost::family_of(params) != cfg.family)
    throw PreconditionError(std::string("parameters are of family ") + cost::to_string(cost::family_of(params)) +
                            ", config expects " + cost::to_string(cfg.family));
  const auto q = cfg.quantities();
  const auto at_w = cost::with_floor(params, q.w);
  VerifyReport report;
  const long double desired = Placement{{{double(q.k), 1.0}, {double(q.N - q.k), q.w}}}.cost(at_w);

  auto record = [&](RowCheck c, long double allowance) {
    c.slack = c.value - c.required;
    report.checked.push_back(c);
    if (c.slack < -(tol * std::max(1.0, std::abs(c.required)) + static_cast<double>(allowance)))
      report.violations.push_back(c);
  };

  if (cfg.ratio_eps) record({"desiredCostPositive", static_cast<double>(desired), 1.0, 0}, 0);

  for (const auto& s : cost::enumerate_scenarios(q, cfg.scenario_options())) {
    if (!s.active) continue;
    const Placement diff = difference_placement(s, q);
    long double value;
    long double allowance;
    try {
      value = diff.cost(at_w);
      allowance = 64 * LDBL_EPSILON * magnitude(diff, at_w);
    } catch (const DomainError& e) {
      throw DomainError(s.row + ": " + e.what());
    }
    const double required = s.margin_scale * cfg.eps * (cfg.ratio_eps ? static_cast<double>(desired) : 1.0);
    record({s.row + " (" + s.name + ")", static_cast<double>(value), required, 0}, allowance);
  }

  if (cfg.convexity) {
    const auto coefs = cost::coefficients(at_w);
    for (double x : curvature_grid(cfg)) {
      const auto basis = cost::second_derivative_basis(cfg.family, x);
      long double sum = 0, mag = 0;
      for (std::size_t i = 0; i < coefs.size(); ++i) {
        sum += basis[i] * coefs[i];
        mag += std::fabs(basis[i] * coefs[i]);
      }
      const long long f = std::llround(x * static_cast<double>(cfg.intvl));
      record({"curvature_condition[" + std::to_string(f) + "]", static_cast<double>(sum), cfg.curv_lower_bound, 0},
             64 * LDBL_EPSILON * mag);
    }
  }
  return report;
}

std::string VerifyReport::to_string() const {
  std::ostringstream out;
  out.precision(10);
  out << "checked " << checked.size() << " rows, " << violations.size() << " violated\n";
  for (const auto& v : violations)
    out << "  violated " << v.name << ": value " << v.value << " required " << v.required << " slack " << v.slack
        << "\n";
  return out.str();
}

namespace {

// Re-solve over the optimal face: objective pinned (within a relative 1e-9)
// and sum |c_i| over the shape coefficients minimised via split variables.
lp::LpSolution l1_tie_break(const FitModel& m, const lp::LpSolution& first, const lp::SolveOptions& opts) {
  lp::LinearProgram lp = m.lp;
  if (!m.lp.objective().empty()) {
    const double opt = first.objective_value;
    const double slack = 1e-9 * std::max(1.0, std::abs(opt));
    lp.add_constraint("optimal_face", m.lp.objective(),
                      m.lp.sense() == lp::Sense::maximize ? Relation::ge : Relation::le,
                      m.lp.sense() == lp::Sense::maximize ? opt - slack : opt + slack);
  }
  const auto& names = cost::coefficient_names(m.family);
  std::vector<Term> l1;
  for (std::size_t i = 0; i < m.coef_vars.size(); ++i) {
    if (names[i] == "C") continue;
    const int t = lp.add_variable("abs_" + names[i], 0.0, kInf);
    lp.add_constraint("abs_" + names[i] + "_pos", {{t, 1.0}, {m.coef_vars[i], -1.0}}, Relation::ge, 0.0);
    lp.add_constraint("abs_" + names[i] + "_neg", {{t, 1.0}, {m.coef_vars[i], 1.0}}, Relation::ge, 0.0);
    l1.push_back({t, 1.0});
  }
  lp.set_objective(lp::Sense::minimize, std::move(l1));
  return lp::solve_lp(lp, opts);
}

// One LP solve of `solve_cfg`, verified against the caller's `cfg`.
FitReport fit_once(const FitConfig& cfg, const FitConfig& solve_cfg, const lp::SolveOptions& opts) {
  const FitModel m = build_fit_lp(solve_cfg);
  FitReport report;
  report.rows = m.lp.num_constraints();
  report.columns = m.lp.num_variables();

  lp::LpSolution sol = lp::solve_lp(m.lp, opts);
  report.lp_status = sol.status;
  report.iterations = sol.iterations;
  if (sol.optimal() && solve_cfg.l1_tie_break) {
    auto second = l1_tie_break(m, sol, opts);

    if (second.optimal()) {
      report.iterations += second.iterations;
      second.values.resize(static_cast<std::size_t>(m.lp.num_variables()));
      sol = std::move(second);
    }
  }
  if (sol.optimal()) {
    std::vector<double> coefs;
    for (int v : m.coef_vars) coefs.push_back(sol.values[v]);
    const auto params = cost::from_coefficients(cfg.family, coefs, cfg.w());
    report.params = params;
    report.func1 = cost::eval(params, 1.0);
    report.funcW = cost::eval(params, cfg.w());
    report.desiredCost = cost::desired_cost(params, cfg.N, cfg.k);
    // Exact: the fit promises every margin in full, not within a tolerance.
    report.verification = verify_parameters(params, cfg, 0.0);
    for (const auto& c : report.verification.checked)
      if (c.name.rfind("curvature", 0) != 0) report.slacks[c.name] = c.slack;
  }
  return report;
}

}  // namespace

FitReport fit_parameters(const FitConfig& cfg, const lp::SolveOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  FitReport report = fit_once(cfg, cfg, opts);

  // The LP meets its rows only up to a relative tolerance, which on
  // coefficients near 1e10 can leave a margin row a few 1e-5 short when
  // re-evaluated exactly. Re-solve with the targets raised by twice the
  // shortfall, a few times at most; verification always uses the original
  // targets.
  FitConfig solve_cfg = cfg;
  for (int round = 0; round < 4 && report.params && !report.verification.ok(); ++round) {
    double margin_short = 0, curv_short = 0;
    for (const auto& v : report.verification.violations) {
      double& worst = v.name.rfind("curvature", 0) == 0 ? curv_short : margin_short;
      worst = std::max(worst, -v.slack);
    }
    solve_cfg.eps += 2 * margin_short;
    solve_cfg.curv_lower_bound += 2 * curv_short;
    FitReport retry = fit_once(cfg, solve_cfg, opts);
    if (!retry.params) break;
    retry.margin_boost = solve_cfg.eps - cfg.eps;
    report = std::move(retry);
  }

  if (report.params) {
    const long long pieces = std::min<long long>(cfg.intvl - cfg.lowCurv, 100000);
    report.convexity =
        cost::convexity_measure(*report.params, cfg.w(), 1.0, static_cast<int>(std::max(1LL, pieces)));
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string FitReport::to_text() const {
  std::ostringstream out;
  out.precision(17);
  out << "lp_status = " << lp::to_string(lp_status) << "\n";
  out << "lp_size = " << rows << " rows x " << columns << " columns, " << iterations << " iterations\n";
  if (params) {
    out << cost::format_params(*params);
    out << "func1 = " << func1 << "\nfuncW = " << funcW << "\ndesiredCost = " << desiredCost << "\n";
    for (const auto& [name, slack] : slacks) out << "slack " << name << " = " << slack << "\n";
    if (margin_boost > 0) out << "margin_boost = " << margin_boost << "\n";
    if (convexity) out << "convexity = " << convexity->numerator << "/" << convexity->denominator << "\n";
    out << "verification = " << (verification.ok() ? "clean" : "violations") << "\n";
    if (!verification.ok()) out << verification.to_string();
  }
  return out.str();
}

}  // namespace mis::fit

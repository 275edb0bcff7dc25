#include "cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "mis/driver.hpp"
#include "mis/errors.hpp"
#include "mis/exact.hpp"
#include "mis/kvfile.hpp"

namespace mis::cli {
namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

// Everything a report needs besides its payload: the echoed command and the
// digest of the graph it ran on, so any report can be reproduced.
struct Report {
  json doc = json::object();

  void render(std::ostream& out, const std::string& format) const {
    if (format == "json") {
      out << doc.dump(2) << "\n";
      return;
    }
    for (const auto& [key, value] : doc.items()) {
      if (value.is_array()) {
        out << key << ":\n";
        for (const auto& item : value) out << "  " << (item.is_string() ? item.get<std::string>() : item.dump()) << "\n";
      } else if (value.is_object()) {
        out << key << ":\n";
        for (const auto& [k2, v2] : value.items())
          out << "  " << k2 << " = " << (v2.is_string() ? v2.get<std::string>() : v2.dump()) << "\n";
      } else {
        out << key << " = " << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
      }
    }
  }
};

std::string join_args(const std::vector<std::string>& args) {
  std::string out;
  for (const auto& a : args) {
    if (!out.empty()) out += ' ';
    out += a.find(' ') == std::string::npos ? a : "'" + a + "'";
  }
  return out;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Graph load_graph(const std::string& path, Report& r) {
  auto parsed = read_graph_file(path);
  r.doc["graph"] = path;
  r.doc["graph_digest"] = graph_digest(parsed.graph);
  r.doc["vertices"] = parsed.graph.n();
  r.doc["edges"] = parsed.graph.edge_count();
  if (!parsed.warnings.empty()) r.doc["warnings"] = parsed.warnings;
  return std::move(parsed.graph);
}

// "lo:hi:step"
driver::SweepConfig parse_range(const std::string& text) {
  driver::SweepConfig s;
  double* slots[] = {&s.w_lo, &s.w_hi, &s.w_step};
  std::stringstream in(text);
  std::string part;
  int i = 0;
  while (std::getline(in, part, ':')) {
    if (i == 3) throw CLI::ValidationError("--w-range", "expected lo:hi:step");
    try {
      std::size_t used = 0;
      *slots[i++] = std::stod(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::logic_error&) {
      throw CLI::ValidationError("--w-range", "'" + part + "' is not a number");
    }
  }
  if (i != 3) throw CLI::ValidationError("--w-range", "expected lo:hi:step");
  return s;
}

json assignment_json(const minimizer::FractionalAssignment& a) {
  json values = json::array();
  for (double v : a.values) values.push_back(v);
  return values;
}

int outcome_code(minimizer::OutcomeStatus s) {
  using minimizer::OutcomeStatus;
  switch (s) {
    case OutcomeStatus::integer_found: return kOk;
    case OutcomeStatus::fractional: return kUnconfirmed;
    case OutcomeStatus::infeasible: return kInfeasible;
    case OutcomeStatus::not_converged:
    case OutcomeStatus::numerical_failure: return kNotConverged;
  }
  return kInternal;
}

// Fills the outcome fields; a witness is only reported after an independent
// is_independent check, and a claimed witness that fails it is an internal
// error rather than a success.
int report_outcome(Report& r, const Graph& g, int k, const minimizer::SolveOutcome& o, bool dump) {
  r.doc["status"] = minimizer::to_string(o.status);
  r.doc["objective"] = o.assignment.objective;
  r.doc["desired_cost"] = o.desired_cost;
  r.doc["fw_gap"] = o.assignment.fw_gap;
  r.doc["iterations"] = o.assignment.iterations;
  r.doc["residual"] = o.assignment.residual;
  r.doc["best_effort"] = o.best_effort;
  if (!o.assignment.note.empty()) r.doc["note"] = o.assignment.note;
  if (o.status == minimizer::OutcomeStatus::integer_found) {
    if (!o.recognized || !is_independent(g, *o.recognized) || static_cast<int>(o.recognized->size()) != k) {
      r.doc["status"] = "internal-error";
      return kInternal;
    }
    r.doc["witness"] = o.recognized->to_string();
  }
  if (dump) r.doc["assignment"] = assignment_json(o.assignment);
  return outcome_code(o.status);
}

struct MinFlags {
  bool cuts = false;
  std::uint64_t seed = 1;
  int max_iters = 5000;
  double gap_tol = 1e-6;
  double band = 0;

  void attach(CLI::App* app) {
    app->add_flag("--cuts", cuts, "Add the edge product cuts as penalties");
    app->add_option("--seed", seed, "Seed for the random starting vertices")->capture_default_str();
    app->add_option("--max-iters", max_iters, "Frank-Wolfe iteration limit")->capture_default_str();
    app->add_option("--gap-tol", gap_tol, "Frank-Wolfe gap tolerance")->capture_default_str();
    app->add_option("--band", band, "Accepted |objective - desired cost|")->capture_default_str();
  }
  minimizer::MinimizeOptions options() const {
    minimizer::MinimizeOptions o;
    o.nonlinear_cuts = cuts;
    o.seed = seed;
    o.max_iters = max_iters;
    o.gap_tol = gap_tol;
    return o;
  }
};

json fit_json(const fit::FitReport& rep) {
  json j;
  j["lp_status"] = lp::to_string(rep.lp_status);
  j["lp_rows"] = rep.rows;
  j["lp_columns"] = rep.columns;
  j["lp_iterations"] = rep.iterations;
  if (rep.params) {
    json p;
    const auto& names = cost::coefficient_names(cost::family_of(*rep.params));
    const auto coefs = cost::coefficients(*rep.params);
    p["family"] = cost::to_string(cost::family_of(*rep.params));
    for (std::size_t i = 0; i < names.size(); ++i) p[names[i]] = coefs[i];
    p["w"] = cost::floor_size(*rep.params);
    j["params"] = p;
    j["func1"] = rep.func1;
    j["funcW"] = rep.funcW;
    j["desiredCost"] = rep.desiredCost;
    if (rep.margin_boost > 0) j["margin_boost"] = rep.margin_boost;
    if (rep.convexity)
      j["convexity"] = std::to_string(rep.convexity->numerator) + "/" + std::to_string(rep.convexity->denominator);
    j["verification"] = rep.verification.ok() ? "clean" : "violations";
    json rows = json::array();
    for (const auto& v : rep.verification.violations) rows.push_back(v.name + " slack " + format_double(v.slack));
    if (!rows.empty()) j["violated_rows"] = rows;
  }
  return j;
}

int fit_code(const fit::FitReport& rep) {
  switch (rep.lp_status) {
    case lp::Status::optimal: return rep.verification.ok() ? kOk : kViolations;
    case lp::Status::infeasible: return kInfeasible;
    default: return kNotConverged;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Maximum independent set toolkit: exact search and the two-step fit/minimise method"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "text";
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();

  std::string graph_path, config_path, params_path, out_path, partial_text, range_text;
  int k = -1;
  MinFlags mf;

  auto* exact = app.add_subcommand("exact", "Exact maximum independent set (branch and bound)");
  std::uint64_t budget = kDefaultExactBudget;
  exact->add_option("--graph", graph_path, "Graph file (DIMACS or edge list)")->required();
  exact->add_option("--budget", budget, "Search node budget")->capture_default_str();

  auto* fitc = app.add_subcommand("fit", "Fit cost-function coefficients (Step A)");
  fitc->add_option("--config", config_path, "Fit configuration")->required();
  fitc->add_option("--out", out_path, "Write the fitted parameters here");

  auto* verify = app.add_subcommand("verify", "Check a parameter set against a fit configuration");
  verify->add_option("--params", params_path, "Parameter file")->required();
  verify->add_option("--config", config_path, "Fit configuration")->required();

  auto* solve = app.add_subcommand("solve", "Minimise the surrogate over the relaxed polytope (Step B)");
  bool dump = false;
  solve->add_option("--graph", graph_path, "Graph file")->required();
  solve->add_option("--params", params_path, "Parameter file")->required();
  solve->add_option("--k", k, "Target set size")->required()->check(CLI::NonNegativeNumber);
  solve->add_option("--partial", partial_text, "Vertices fixed at 1, e.g. \"5,8,9\"");
  solve->add_flag("--dump", dump, "Include every x_j in the report");
  mf.attach(solve);

  auto* sweep = app.add_subcommand("sweep", "Step B over a range of floor sizes w");
  bool refit = false, first_hit = false;
  unsigned jobs = 1;
  sweep->add_option("--graph", graph_path, "Graph file")->required();
  sweep->add_option("--config", config_path, "Fit configuration template")->required();
  sweep->add_option("--k", k, "Target set size (default: the config's k)");
  sweep->add_option("--w-range", range_text, "lo:hi:step")->required();
  sweep->add_option("--params", params_path, "Transfer these parameters instead of fitting");
  sweep->add_option("--partial", partial_text, "Vertices fixed at 1");
  sweep->add_flag("--refit", refit, "Re-run Step A at every w");
  sweep->add_flag("--first-hit", first_hit, "Stop at the first integer-found w");
  sweep->add_option("--jobs", jobs, "Concurrent runs")->capture_default_str()->check(CLI::PositiveNumber);
  mf.attach(sweep);

  auto* search = app.add_subcommand("search", "Search for the largest confirmable k");
  std::string mode = "upward";
  int k_hi = -1, retries = 3;
  search->add_option("--graph", graph_path, "Graph file")->required();
  search->add_option("--config", config_path, "Fit configuration template")->required();
  search->add_option("--mode", mode, "upward or binary")->check(CLI::IsMember({"upward", "binary"}))->capture_default_str();
  search->add_option("--k-hi", k_hi, "Largest k tried (default N)");
  search->add_option("--retries", retries, "Seeds tried per (k, w) before giving up")->capture_default_str()->check(CLI::PositiveNumber);
  mf.attach(search);

  auto* gen = app.add_subcommand("gen", "Seeded random graph in DIMACS format");
  int gen_n = 20;
  double gen_p = 0.3;
  std::uint64_t gen_seed = 1;
  gen->add_option("--n", gen_n, "Vertices")->required()->check(CLI::NonNegativeNumber);
  gen->add_option("--p", gen_p, "Edge probability")->required()->check(CLI::Range(0.0, 1.0));
  gen->add_option("--seed", gen_seed, "Seed")->capture_default_str();
  gen->add_option("--out", out_path, "Output file (default stdout)");

  auto* bench = app.add_subcommand("bench", "Time the exact solver on seeded random graphs");
  std::vector<int> bench_sizes{20, 40, 60};
  int bench_count = 5;
  bench->add_option("--sizes", bench_sizes, "Vertex counts")->capture_default_str();
  bench->add_option("--count", bench_count, "Graphs per size")->capture_default_str();
  bench->add_option("--p", gen_p, "Edge probability")->capture_default_str();
  bench->add_option("--seed", gen_seed, "First seed")->capture_default_str();

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  Report r;
  r.doc["command"] = join_args(args);
  const auto t0 = Clock::now();
  int code = kOk;
  try {
    if (*exact) {
      const Graph g = load_graph(graph_path, r);
      const auto res = exact_mis(g, budget);
      r.doc["status"] = res.optimal() ? "optimal" : "unknown";
      r.doc["alpha"] = res.alpha;
      r.doc["witness"] = res.witness.to_string();
      r.doc["nodes"] = res.nodes;
      if (!is_independent(g, res.witness)) throw std::logic_error("exact witness is not independent");
      code = res.optimal() ? kOk : kNotConverged;
    } else if (*fitc) {
      const auto cfg = fit::FitConfig::read(config_path);
      r.doc["config"] = config_path;
      const auto rep = fit::fit_parameters(cfg);
      const auto fitted = fit_json(rep);
      for (const auto& [key, value] : fitted.items()) r.doc[key] = value;
      if (rep.params && !out_path.empty()) {
        std::ofstream f(out_path);
        if (!f) throw ParseError(0, "cannot write " + out_path);
        f << cost::format_params(*rep.params);
      }
      code = fit_code(rep);
    } else if (*verify) {
      const auto params = cost::read_params(params_path);
      const auto cfg = fit::FitConfig::read(config_path);
      r.doc["params"] = params_path;
      r.doc["config"] = config_path;
      const auto rep = fit::verify_parameters(params, cfg);
      const auto model = fit::build_fit_lp(cfg);
      const auto lp_check = lp::check_feasible(model.lp, fit::complete_point(model, params), 1e-6);
      r.doc["status"] = rep.ok() && lp_check.feasible() ? "clean" : "violations";
      r.doc["rows_checked"] = rep.checked.size();
      json rows = json::array();
      for (const auto& v : rep.violations)
        rows.push_back(v.name + ": value " + format_double(v.value) + " required " + format_double(v.required));
      r.doc["violated_rows"] = rows;
      json lp_rows = json::array();
      for (const auto& v : lp_check.violations) lp_rows.push_back(v.name + " slack " + format_double(v.slack));
      r.doc["lp_rows_violated"] = lp_rows;
      code = rep.ok() && lp_check.feasible() ? kOk : kViolations;
    } else if (*solve) {
      const Graph g = load_graph(graph_path, r);
      const auto params = cost::read_params(params_path);
      const double w = cost::floor_size(params);
      const VertexSet partial = VertexSet::parse(partial_text);
      minimizer::PolytopeSpec spec(g, k, w, partial, mf.band);
      r.doc["k"] = k;
      r.doc["w"] = w;
      if (!partial.empty()) r.doc["partial"] = partial.to_string();
      const auto o = minimizer::solve_step_b(spec, params, mf.options());
      code = report_outcome(r, g, k, o, dump);
    } else if (*sweep) {
      const Graph g = load_graph(graph_path, r);
      auto cfg = fit::FitConfig::read(config_path);
      if (k < 0) k = cfg.k;
      auto sc = parse_range(range_text);
      sc.opts = mf.options();
      sc.band = mf.band;
      sc.jobs = jobs;
      sc.partial = VertexSet::parse(partial_text);
      sc.stop_mode = first_hit ? driver::StopMode::first_hit : driver::StopMode::collect_all;
      std::optional<cost::CostParams> transfer;
      if (!params_path.empty()) transfer = cost::read_params(params_path);
      const auto points = driver::sweep_w(g, k, cfg, sc, refit, transfer);
      json trace = json::array(), hits = json::array();
      for (const auto& p : points) {
        trace.push_back(p.trace.line());
        if (p.hit()) {
          if (!is_independent(g, *p.outcome.recognized)) throw std::logic_error("sweep witness is not independent");
          hits.push_back("w=" + format_double(p.w) + " set=" + p.outcome.recognized->to_string());
        }
      }
      r.doc["k"] = k;
      r.doc["runs"] = points.size();
      r.doc["hits"] = hits.size();
      r.doc["status"] = hits.empty() ? "unconfirmed" : "integer-found";
      r.doc["trace"] = trace;
      r.doc["hit_list"] = hits;
      code = hits.empty() ? kUnconfirmed : kOk;
    } else if (*search) {
      const Graph g = load_graph(graph_path, r);
      const auto cfg = fit::FitConfig::read(config_path);
      driver::SearchOptions so;
      so.mode = mode == "binary" ? driver::SearchMode::binary : driver::SearchMode::upward;
      so.k_hi = k_hi;
      so.opts = mf.options();
      so.band = mf.band;
      so.seeds.clear();
      for (int i = 0; i < retries; ++i) so.seeds.push_back(mf.seed + static_cast<std::uint64_t>(i));
      driver::ParamCache cache;
      const auto res = driver::search_k(g, cfg, so, &cache);
      if (!is_independent(g, res.witness) || static_cast<int>(res.witness.size()) != res.best_k)
        throw std::logic_error("search witness is not independent");
      r.doc["best_k"] = res.best_k;
      r.doc["witness"] = res.witness.to_string();
      json unconf = json::array();
      for (int u : res.unconfirmed) unconf.push_back(u);
      r.doc["unconfirmed"] = unconf;
      json trace = json::array();
      for (const auto& t : res.trace) trace.push_back(t.line());
      r.doc["trace"] = trace;
      r.doc["status"] = "confirmed";
      code = kOk;
    } else if (*gen) {
      const Graph g = random_graph(gen_n, gen_p, gen_seed);
      const std::string text = emit_dimacs(g);
      if (out_path.empty()) {
        out << text;
        return kOk;
      }
      std::ofstream f(out_path);
      if (!f) throw ParseError(0, "cannot write " + out_path);
      f << text;
      r.doc["out"] = out_path;
      r.doc["graph_digest"] = graph_digest(g);
      r.doc["edges"] = g.edge_count();
    } else if (*bench) {
      json rows = json::array();
      for (int n : bench_sizes) {
        double total = 0;
        std::uint64_t nodes = 0;
        int unknown = 0;
        for (int i = 0; i < bench_count; ++i) {
          const Graph g = random_graph(n, gen_p, gen_seed + static_cast<std::uint64_t>(i));
          const auto t1 = Clock::now();
          const auto res = exact_mis(g);
          total += seconds_since(t1);
          nodes += res.nodes;
          unknown += !res.optimal();
        }
        char line[160];
        std::snprintf(line, sizeof line, "n=%d graphs=%d mean_seconds=%.6f mean_nodes=%.0f unknown=%d", n, bench_count,
                      total / bench_count, static_cast<double>(nodes) / bench_count, unknown);
        rows.push_back(line);
      }
      r.doc["results"] = rows;
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  r.doc["exit_code"] = code;
  r.doc["seconds"] = seconds_since(t0);
  r.render(out, format);
  return code;
}

}  // namespace mis::cli

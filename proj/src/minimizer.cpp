#include "mis/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mis/errors.hpp"
#include "mis/lp.hpp"
#include "mis/rng.hpp"

namespace mis::minimizer {

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::converged: return "converged";
    case RunStatus::not_converged: return "not-converged";
    case RunStatus::infeasible: return "infeasible";
    case RunStatus::numerical_failure: return "numerical-failure";
  }
  return "?";
}

const char* to_string(OutcomeStatus s) {
  switch (s) {
    case OutcomeStatus::integer_found: return "integer-found";
    case OutcomeStatus::fractional: return "fractional";
    case OutcomeStatus::infeasible: return "infeasible";
    case OutcomeStatus::not_converged: return "not-converged";
    case OutcomeStatus::numerical_failure: return "numerical-failure";
  }
  return "?";
}

PolytopeSpec::PolytopeSpec(Graph g, int k_, double w_, VertexSet fixed, double band_)
    : graph(std::move(g)), k(k_), w(w_), fixed_ones(std::move(fixed)), band(band_) {
  if (k < 0 || k > graph.n()) throw PreconditionError("k must lie in 0..N");
  if (!(w >= 0 && w < 1)) throw PreconditionError("w must lie in [0, 1)");
  if (!(band >= 0)) throw PreconditionError("band must be non-negative");
  if (!is_independent(graph, fixed_ones))
    throw PreconditionError("fixed vertices {" + fixed_ones.to_string() + "} are not independent");
}

std::string FractionalAssignment::dump() const {
  std::ostringstream out;
  out.precision(12);
  for (std::size_t j = 0; j < values.size(); ++j) out << j + 1 << " " << values[j] << "\n";
  return out.str();
}

namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

class FrankWolfe {
 public:
  FrankWolfe(const PolytopeSpec& spec, const cost::CostParams& params, const MinimizeOptions& opts)
      : spec_(spec), params_(params), opts_(opts), n_(spec.graph.n()) {
    for (const auto& e : spec.graph.edges()) edges_.push_back({e.u - 1, e.v - 1});
    c17_ = (1 + spec.w) * (1 + spec.w) / 4 - opts.epsilon_cut;
    for (int j = 0; j < n_; ++j) {
      const bool fix = spec.fixed_ones.contains(j + 1);
      lp_.add_variable("x" + std::to_string(j + 1), fix ? 1.0 : spec.w, 1.0);
    }
    for (const auto& [a, b] : edges_)
      lp_.add_constraint("edge_" + std::to_string(a + 1) + "_" + std::to_string(b + 1), {{a, 1.0}, {b, 1.0}},
                         lp::Relation::le, 1.0 + spec.w);
    std::vector<lp::Term> all;
    for (int j = 0; j < n_; ++j) all.push_back({j, 1.0});
    lp_.add_constraint("size", std::move(all), lp::Relation::eq, spec.target_sum());
    lp_opts_.tol_feas = opts.tol_feas;
  }

  FractionalAssignment run() {
    FractionalAssignment out;
    out.values.assign(n_, spec_.w);
    if (!start(out)) return finish(out);

    const int rounds = opts_.nonlinear_cuts ? std::max(1, opts_.penalty_rounds) : 1;
    for (int r = 0; r < rounds; ++r) {
      mu_ = opts_.nonlinear_cuts ? opts_.mu0 * std::pow(opts_.mu_growth, r) : 0.0;
      const int budget = opts_.max_iters - out.iterations;
      if (budget <= 0) break;
      iterate(out, r + 1 == rounds ? budget : std::max(1, budget / (rounds - r)));
      if (out.status == RunStatus::numerical_failure || out.status == RunStatus::infeasible) break;
    }
    return finish(out);
  }

 private:
  // Starting point: average of the phase-1 vertex and seeded random-objective
  // vertices. Returns false if the polytope is empty.
  bool start(FractionalAssignment& out) {
    lp_.set_objective(lp::Sense::minimize, {});
    auto first = lp::solve_lp(lp_, lp_opts_);
    if (first.status == lp::Status::infeasible) {
      out.status = RunStatus::infeasible;
      out.note = "polytope is empty";
      return false;
    }
    if (!first.optimal()) {
      out.status = RunStatus::numerical_failure;
      out.note = std::string("feasibility LP ended ") + lp::to_string(first.status);
      return false;
    }
    basis_ = first.basis;
    add_vertex(clean(first.values));
    SplitMix64 rng(opts_.seed);
    for (int t = 0; t < opts_.start_vertices; ++t) {
      Vec c(n_);
      for (auto& v : c) v = rng.uniform(-1.0, 1.0);
      Vec s;
      if (!lmo(c, s)) {
        out.status = RunStatus::numerical_failure;
        out.note = "vertex LP failed";
        return false;
      }
      add_vertex(s);
    }
    const double share = 1.0 / static_cast<double>(verts_.size());
    weights_.assign(verts_.size(), share);
    x_.assign(n_, 0.0);
    for (const auto& v : verts_)
      for (int j = 0; j < n_; ++j) x_[j] += share * v[j];
    return true;
  }

  Vec clean(const Vec& v) const {
    Vec out = v;
    for (int j = 0; j < n_; ++j) out[j] = std::clamp(out[j], lp_.variable(j).lower, 1.0);
    return out;
  }

  // Adds v to the active set unless already present; returns its index.
  std::size_t add_vertex(const Vec& v) {
    for (std::size_t i = 0; i < verts_.size(); ++i) {
      double diff = 0;
      for (int j = 0; j < n_; ++j) diff = std::max(diff, std::abs(verts_[i][j] - v[j]));
      if (diff <= 1e-12) return i;
    }
    verts_.push_back(v);
    weights_.push_back(0.0);
    return verts_.size() - 1;
  }

  bool lmo(const Vec& grad, Vec& vertex) {
    double scale = 0;
    for (double g : grad) scale = std::max(scale, std::abs(g));
    std::vector<lp::Term> obj;
    for (int j = 0; j < n_; ++j)
      if (scale > 0) obj.push_back({j, grad[j] / scale});
    lp_.set_objective(lp::Sense::minimize, std::move(obj));
    lp::SolveOptions o = lp_opts_;
    o.warm_start = &basis_;
    auto sol = lp::solve_lp(lp_, o);
    if (!sol.optimal()) return false;
    basis_ = std::move(sol.basis);
    vertex = clean(sol.values);
    return true;
  }

  long double f_of(double x, int j) const {
    try {
      return cost::eval_ld(params_, x);
    } catch (const DomainError& e) {
      throw DomainError("vertex " + std::to_string(j + 1) + ": " + e.what());
    }
  }

  double penalty(const Vec& x) const {
    if (mu_ == 0) return 0;
    long double p = 0;
    for (const auto& [a, b] : edges_) {
      const double prod = x[a] * x[b];
      const double v17 = std::max(0.0, prod - c17_), v18 = std::max(0.0, prod - spec_.w);
      p += v17 * v17 + v18 * v18;
    }
    return static_cast<double>(mu_ * p);
  }

  long double separable(const Vec& x) const {
    long double s = 0, comp = 0;
    for (int j = 0; j < n_; ++j) {
      const long double v = f_of(x[j], j);
      const long double t = s + v;
      comp += std::fabs(s) >= std::fabs(v) ? (s - t) + v : (v - t) + s;
      s = t;
    }
    return s + comp;
  }

  long double objective(const Vec& x) const { return separable(x) + penalty(x); }

  Vec gradient(const Vec& x) const {
    Vec g(n_);
    for (int j = 0; j < n_; ++j) {
      try {
        g[j] = cost::first_derivative(params_, x[j]);
      } catch (const DomainError& e) {
        throw DomainError("vertex " + std::to_string(j + 1) + ": " + e.what());
      }
    }
    if (mu_ != 0) {
      for (const auto& [a, b] : edges_) {
        const double prod = x[a] * x[b];
        const double v = std::max(0.0, prod - c17_) + std::max(0.0, prod - spec_.w);
        if (v > 0) {
          g[a] += 2 * mu_ * v * x[b];
          g[b] += 2 * mu_ * v * x[a];
        }
      }
    }
    return g;
  }

  Vec along(const Vec& d, double gamma) const {
    Vec y = x_;
    for (int j = 0; j < n_; ++j) y[j] += gamma * d[j];
    return y;
  }

  // Best step in [0, gmax]: bisection on the directional derivative, then the
  // better of that point and the two ends, so concave stretches are handled.
  double line_search(const Vec& d, double gmax, long double f0, long double& f_new) const {
    auto dphi = [&](double g) { return dot(gradient(along(d, g)), d); };
    const double d0 = dphi(0.0);
    double gstar = 0.0;
    if (d0 < 0) {
      if (dphi(gmax) <= 0) {
        gstar = gmax;
      } else {
        double lo = 0.0, hi = gmax;
        for (int it = 0; it < 80 && hi - lo > 1e-16 * gmax; ++it) {
          const double mid = 0.5 * (lo + hi);
          (dphi(mid) < 0 ? lo : hi) = mid;
        }
        gstar = 0.5 * (lo + hi);
      }
    }
    double best = 0.0;
    f_new = f0;
    for (double g : {gstar, gmax}) {
      if (g <= 0) continue;
      const long double v = objective(along(d, g));
      if (v < f_new) {
        f_new = v;
        best = g;
      }
    }
    if (best == 0.0 && d0 < 0) {
      for (double g = (gstar > 0 ? gstar : gmax) / 2; g > 1e-14 * gmax; g /= 2) {
        const long double v = objective(along(d, g));
        if (v < f0) {
          f_new = v;
          return g;
        }
      }
    }
    return best;
  }

  double residual(const Vec& x) const {
    double r = 0, sum = 0;
    for (int j = 0; j < n_; ++j) {
      r = std::max({r, lp_.variable(j).lower - x[j], x[j] - 1.0});
      sum += x[j];
    }
    for (const auto& [a, b] : edges_) r = std::max(r, x[a] + x[b] - 1.0 - spec_.w);
    return std::max(r, std::abs(sum - spec_.target_sum()));
  }

  void iterate(FractionalAssignment& out, int budget) {
    out.note.clear();
    long double f = objective(x_);
    const double residual_limit = 100 * opts_.tol_feas * std::max(1.0, spec_.target_sum());
    for (int it = 0; it < budget; ++it, ++out.iterations) {
      const Vec g = gradient(x_);
      Vec s;
      if (!lmo(g, s)) {
        out.status = RunStatus::numerical_failure;
        out.note = "vertex LP failed";
        return;
      }
      Vec d_fw(n_);
      for (int j = 0; j < n_; ++j) d_fw[j] = s[j] - x_[j];
      const double gap = -dot(g, d_fw);
      out.fw_gap = gap;
      double gscale = 1.0;
      for (double v : g) gscale = std::max(gscale, std::abs(v));
      if (gap <= opts_.gap_tol * gscale) {
        out.status = RunStatus::converged;
        return;
      }

      // Away direction from the worst active vertex.
      std::size_t away = verts_.size();
      double away_gap = -1;
      if (opts_.away_steps && verts_.size() > 1) {
        double worst = -INFINITY;
        for (std::size_t i = 0; i < verts_.size(); ++i) {
          const double v = dot(g, verts_[i]);
          if (v > worst) {
            worst = v;
            away = i;
          }
        }
        away_gap = worst - dot(g, x_);
      }

      bool stepped = false;
      for (int attempt = 0; attempt < 2 && !stepped; ++attempt) {
        const bool use_away = attempt == 0 && away < verts_.size() && away_gap > gap;
        if (attempt == 1 && !(away < verts_.size() && away_gap > gap)) break;
        Vec d(n_);
        double gmax = 1.0;
        if (use_away) {
          for (int j = 0; j < n_; ++j) d[j] = x_[j] - verts_[away][j];
          const double a = weights_[away];
          gmax = a < 1 ? a / (1 - a) : 1e12;
        } else {
          d = d_fw;
        }
        long double f_new = f;
        const double gamma = line_search(d, gmax, f, f_new);
        if (gamma <= 0) continue;

        x_ = along(d, gamma);
        if (use_away) {
          for (auto& wt : weights_) wt *= (1 + gamma);
          weights_[away] -= gamma;
          if (gamma >= gmax || weights_[away] <= 1e-15) drop(away);
        } else if (gamma >= 1.0) {
          verts_.assign(1, s);
          weights_.assign(1, 1.0);
          x_ = s;
        } else {
          for (auto& wt : weights_) wt *= (1 - gamma);
          weights_[add_vertex(s)] += gamma;
        }
        if (!(f_new <= f + 1e-15L * std::max(1.0L, std::fabs(f)))) {
          out.status = RunStatus::numerical_failure;
          out.note = "objective increased during a step";
          return;
        }
        f = objective(x_);
        stepped = true;
      }
      if (!stepped) {
        out.status = RunStatus::not_converged;
        out.note = "no descent along the Frank-Wolfe or away direction (stationary point of a non-convex f)";
        return;
      }
      out.residual = residual(x_);
      if (out.residual > residual_limit) {
        out.status = RunStatus::numerical_failure;
        out.note = "iterate left the polytope";
        return;
      }
    }
    out.status = RunStatus::not_converged;
    out.note = "iteration limit reached";
  }

  void drop(std::size_t i) {
    verts_.erase(verts_.begin() + static_cast<std::ptrdiff_t>(i));
    weights_.erase(weights_.begin() + static_cast<std::ptrdiff_t>(i));
    double total = 0;
    for (double w : weights_) total += w;
    for (auto& w : weights_) w /= total;
  }

  FractionalAssignment& finish(FractionalAssignment& out) {
    if (out.status == RunStatus::infeasible) return out;
    if (!x_.empty()) out.values = x_;
    out.objective = static_cast<double>(separable(out.values));
    out.penalty = penalty(out.values);
    out.residual = residual(out.values);
    return out;
  }

  const PolytopeSpec& spec_;
  const cost::CostParams& params_;
  const MinimizeOptions& opts_;
  int n_;
  std::vector<std::pair<int, int>> edges_;
  double c17_ = 0, mu_ = 0;
  lp::LinearProgram lp_;
  lp::SolveOptions lp_opts_;
  lp::Basis basis_;
  std::vector<Vec> verts_;
  std::vector<double> weights_;
  Vec x_;
};

}  // namespace

FractionalAssignment minimize(const PolytopeSpec& spec, const cost::CostParams& params, const MinimizeOptions& opts) {
  const int n = spec.graph.n();
  if (spec.k == 0) {
    FractionalAssignment out;
    out.values.assign(n, spec.w);
    long double total = 0;
    for (int j = 0; j < n; ++j) total += cost::eval_ld(params, spec.w);
    out.objective = static_cast<double>(total);
    return out;
  }
  if (static_cast<int>(spec.fixed_ones.size()) > spec.k) {
    FractionalAssignment out;
    out.values.assign(n, spec.w);
    out.status = RunStatus::infeasible;
    out.note = "more fixed vertices than k";
    return out;
  }
  FrankWolfe fw(spec, params, opts);
  return fw.run();
}

std::optional<VertexSet> round_solution(const FractionalAssignment& a, const Graph& g, int k, double w,
                                        double margin) {
  const double threshold = 0.5 * (1 + w) + margin;
  VertexSet chosen;
  for (std::size_t j = 0; j < a.values.size(); ++j)
    if (a.values[j] > threshold) chosen.insert(static_cast<VertexId>(j + 1));
  if (static_cast<int>(chosen.size()) != k || !is_independent(g, chosen)) return std::nullopt;
  return chosen;
}

SolveOutcome solve_step_b(const PolytopeSpec& spec, const cost::CostParams& params, const MinimizeOptions& opts) {
  const auto at_w = cost::with_floor(params, spec.w);
  SolveOutcome out;
  out.desired_cost = cost::desired_cost(at_w, spec.graph.n(), spec.k);
  // The midpoint test cannot see curvature under a constant offset of 1e10,
  // so non-convexity is judged by the sign of the analytic f''.
  const double lo = spec.w > 0 ? spec.w : 1e-6;
  for (int i = 0; i <= 1000 && !out.best_effort; ++i) {
    try {
      out.best_effort = cost::second_derivative(at_w, lo + (1.0 - lo) * i / 1000.0) < 0;
    } catch (const DomainError&) {
      out.best_effort = true;
    }
  }

  out.assignment = minimize(spec, at_w, opts);
  switch (out.assignment.status) {
    case RunStatus::infeasible: out.status = OutcomeStatus::infeasible; return out;
    case RunStatus::numerical_failure: out.status = OutcomeStatus::numerical_failure; return out;
    default: break;
  }
  const double margin = std::max(opts.margin >= 0 ? opts.margin : 10 * opts.tol_feas, out.assignment.residual);
  out.recognized = round_solution(out.assignment, spec.graph, spec.k, spec.w, margin);
  const double diff = std::abs(out.assignment.objective - out.desired_cost);
  const bool in_band = diff <= spec.band + 1e-12 * std::max(1.0, std::abs(out.desired_cost));
  if (out.recognized && in_band)
    out.status = OutcomeStatus::integer_found;
  else
    out.status = out.assignment.status == RunStatus::converged ? OutcomeStatus::fractional
                                                               : OutcomeStatus::not_converged;
  return out;
}

}  // namespace mis::minimizer

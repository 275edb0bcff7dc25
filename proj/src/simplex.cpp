// Bounded-variable primal simplex.
//
// Every row i carries a logical s_i with a_i x - s_i = 0, so the initial
// all-logical basis is always available. The basis matrix B = [A_S | -E_R]
// (basic structurals S, basic logicals R) is handled through its structural
// kernel M = A[P, S], where P are the rows whose logical is nonbasic
// (|P| = |S|). The fitting LPs have a handful of columns against thousands of
// rows, so M stays small and is refactored from scratch every iteration.
// Basic values are likewise recomputed from the nonbasic ones each time,
// which keeps drift out of long runs.
//
// Phase 1 is the composite one: the cost of a basic variable is -1 below its
// lower bound, +1 above its upper bound, 0 otherwise. Pricing is Dantzig with
// a Harris two-pass ratio test, falling back to Bland's rule for both choices
// after a run of pivots that make no progress.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "mis/errors.hpp"
#include "mis/lp.hpp"

namespace mis::lp {
namespace {

struct Scaled {
  int n = 0, m = 0;
  std::vector<int> start, row;  // CSC
  std::vector<double> val;
  std::vector<double> lb, ub;  // structurals then logicals
  std::vector<double> cost;    // structurals, minimization
  std::vector<double> col_scale, row_scale;
};

double pow2_round(double v) { return std::exp2(std::round(std::log2(v))); }

Scaled build(const LinearProgram& lp, bool scaling) {
  Scaled s;
  s.n = lp.num_variables();
  s.m = lp.num_constraints();
  s.col_scale.assign(s.n, 1.0);
  s.row_scale.assign(s.m, 1.0);

  if (scaling) {
    // Geometric mean scaling in powers of two, alternating rows and columns.
    for (int pass = 0; pass < 6; ++pass) {
      for (int i = 0; i < s.m; ++i) {
        double lo = kInf, hi = 0.0;
        for (const auto& t : lp.constraint(i).terms) {
          const double a = std::abs(t.coef) * s.col_scale[t.var];
          lo = std::min(lo, a);
          hi = std::max(hi, a);
        }
        if (hi > 0.0) s.row_scale[i] = pow2_round(1.0 / std::sqrt(lo * hi));
      }
      std::vector<double> lo(s.n, kInf), hi(s.n, 0.0);
      for (int i = 0; i < s.m; ++i)
        for (const auto& t : lp.constraint(i).terms) {
          const double a = std::abs(t.coef) * s.row_scale[i];
          lo[t.var] = std::min(lo[t.var], a);
          hi[t.var] = std::max(hi[t.var], a);
        }
      for (int j = 0; j < s.n; ++j)
        if (hi[j] > 0.0) s.col_scale[j] = pow2_round(1.0 / std::sqrt(lo[j] * hi[j]));
    }
  }

  std::vector<int> count(s.n + 1, 0);
  for (const auto& row : lp.constraints())
    for (const auto& t : row.terms) ++count[t.var + 1];
  s.start.assign(s.n + 1, 0);
  for (int j = 0; j < s.n; ++j) s.start[j + 1] = s.start[j] + count[j + 1];
  s.row.resize(s.start[s.n]);
  s.val.resize(s.start[s.n]);
  std::vector<int> fill(s.start.begin(), s.start.end() - 1);
  for (int i = 0; i < s.m; ++i)
    for (const auto& t : lp.constraint(i).terms) {
      const int at = fill[t.var]++;
      s.row[at] = i;
      s.val[at] = t.coef * s.row_scale[i] * s.col_scale[t.var];
    }

  s.lb.resize(s.n + s.m);
  s.ub.resize(s.n + s.m);
  for (int j = 0; j < s.n; ++j) {
    s.lb[j] = lp.variable(j).lower / s.col_scale[j];
    s.ub[j] = lp.variable(j).upper / s.col_scale[j];
  }
  for (int i = 0; i < s.m; ++i) {
    const auto& row = lp.constraint(i);
    const double r = row.rhs * s.row_scale[i];
    s.lb[s.n + i] = row.rel == Relation::le ? -kInf : r;
    s.ub[s.n + i] = row.rel == Relation::ge ? kInf : r;
  }
  s.cost.assign(s.n, 0.0);
  const double sign = lp.sense() == Sense::maximize ? -1.0 : 1.0;
  for (const auto& t : lp.objective()) s.cost[t.var] = sign * t.coef * s.col_scale[t.var];
  return s;
}

class Simplex {
 public:
  Simplex(const Scaled& p, const SolveOptions& opts) : p_(p), opts_(opts) {
    const int total = p_.n + p_.m;
    status_.resize(total);
    x_.assign(total, 0.0);
    if (!try_warm_start()) {
      for (int j = 0; j < p_.n; ++j) status_[j] = resting_status(j);
      for (int i = 0; i < p_.m; ++i) status_[p_.n + i] = VarStatus::basic;
    }
    pos_in_p_.assign(p_.m, -1);
  }

  Status run(int& iterations) {
    int stalled = 0;
    bool bland = false;
    double best_phase1 = kInf, best_phase2 = kInf;
    for (iterations = 0;; ++iterations) {
      factor();
      compute_values();
      const bool phase1 = set_phase_costs();
      if (iterations >= opts_.max_iters) return Status::iteration_limit;

      // Bland's rule takes over after a run of pivots that improve neither
      // the infeasibility nor the objective; this also catches cycles whose
      // steps are not exactly zero.
      const double merit = phase1 ? infeasibility() : objective();
      double& best = phase1 ? best_phase1 : best_phase2;
      if (merit < best - 1e-12 * std::max(1.0, std::abs(best))) {
        best = merit;
        stalled = 0;
      } else if (++stalled > opts_.bland_after) {
        bland = true;
      }

      compute_duals();
      int sigma = 0;
      const int q = price(bland, sigma);
      if (q < 0) return phase1 ? Status::infeasible : Status::optimal;

      ftran(q);
      double step = 0.0;
      bool flip = false;
      const int leave = ratio_test(q, sigma, bland, step, flip);
      if (leave < 0 && !flip) {
        if (phase1) return Status::infeasible;  // unreachable in exact arithmetic
        return Status::unbounded;
      }

      if (flip) {
        status_[q] = sigma > 0 ? VarStatus::at_upper : VarStatus::at_lower;
      } else {
        status_[leave] = leave_to_upper_ ? VarStatus::at_upper : VarStatus::at_lower;
        status_[q] = VarStatus::basic;
      }
    }
  }

  const std::vector<double>& values() const { return x_; }
  const std::vector<VarStatus>& statuses() const { return status_; }

 private:
  bool fixed(int k) const { return p_.lb[k] == p_.ub[k]; }

  VarStatus resting_status(int k) const {
    if (std::isfinite(p_.lb[k])) return VarStatus::at_lower;
    if (std::isfinite(p_.ub[k])) return VarStatus::at_upper;
    return VarStatus::free_zero;
  }

  double nonbasic_value(int k) const {
    switch (status_[k]) {
      case VarStatus::at_lower: return p_.lb[k];
      case VarStatus::at_upper: return p_.ub[k];
      default: return 0.0;
    }
  }

  // Feasibility tolerance for variable k at `bound`. Logicals also scale with
  // the row's activity magnitude: recomputed values of size 1e9 carry
  // roundoff far above an absolute 1e-8, and treating that as infeasibility
  // makes phase 1 and phase 2 undo each other's pivots.
  double tol_at(int k, double bound) const {
    double scale = std::max(1.0, std::abs(bound));
    if (k >= p_.n) scale = std::max(scale, row_mag_[k - p_.n]);
    return opts_.tol_feas * scale;
  }

  bool try_warm_start() {
    const Basis* b = opts_.warm_start;
    if (!b || static_cast<int>(b->columns.size()) != p_.n || static_cast<int>(b->rows.size()) != p_.m) return false;
    int basics = 0;
    for (int j = 0; j < p_.n; ++j) {
      status_[j] = b->columns[j];
      basics += status_[j] == VarStatus::basic;
    }
    for (int i = 0; i < p_.m; ++i) {
      status_[p_.n + i] = b->rows[i];
      basics += b->rows[i] == VarStatus::basic;
    }
    if (basics != p_.m) return false;
    // Statuses pointing at infinite bounds are repaired to the nearest valid one.
    for (int k = 0; k < p_.n + p_.m; ++k) {
      auto& st = status_[k];
      if ((st == VarStatus::at_lower && !std::isfinite(p_.lb[k])) ||
          (st == VarStatus::at_upper && !std::isfinite(p_.ub[k])) ||
          (st == VarStatus::free_zero && (std::isfinite(p_.lb[k]) || std::isfinite(p_.ub[k]))))
        st = resting_status(k);
    }
    return true;
  }

  // Builds S, P, R and the LU of M = A[P, S]; a singular kernel is repaired
  // by swapping dependent structurals out for logicals.
  void factor() {
    for (int attempt = 0;; ++attempt) {
      basic_struct_.clear();
      prow_.clear();
      for (int j = 0; j < p_.n; ++j)
        if (status_[j] == VarStatus::basic) basic_struct_.push_back(j);
      for (int i = 0; i < p_.m; ++i) {
        if (status_[p_.n + i] == VarStatus::basic) {
          pos_in_p_[i] = -1;
        } else {
          pos_in_p_[i] = static_cast<int>(prow_.size());
          prow_.push_back(i);
        }
      }
      if (prow_.size() != basic_struct_.size()) throw std::logic_error("simplex: basis size mismatch");
      const int k = static_cast<int>(basic_struct_.size());
      kernel_.setZero(k, k);
      for (int s = 0; s < k; ++s) {
        const int j = basic_struct_[s];
        for (int e = p_.start[j]; e < p_.start[j + 1]; ++e)
          if (pos_in_p_[p_.row[e]] >= 0) kernel_(pos_in_p_[p_.row[e]], s) = p_.val[e];
      }
      if (k == 0) return;
      lu_.compute(kernel_);
      if (lu_.rcond() > 1e-14) return;
      if (attempt == 3) throw std::runtime_error("simplex: basis repair failed");
      repair(attempt == 0 ? 1e-12 : attempt == 1 ? 1e-10 : 1e-8);
    }
  }

  void repair(double threshold) {
    Eigen::FullPivLU<Eigen::MatrixXd> full(kernel_);
    full.setThreshold(threshold);
    const int k = static_cast<int>(basic_struct_.size());
    const int rank = static_cast<int>(full.rank());
    const auto& cols = full.permutationQ().indices();
    const auto& rows = full.permutationP().indices();
    // Columns beyond the rank leave; rows beyond the rank get their logical back.
    for (int t = rank; t < k; ++t) status_[basic_struct_[cols(t)]] = resting_status(basic_struct_[cols(t)]);
    std::vector<int> p_of_row(k);
    for (int r = 0; r < k; ++r) p_of_row[rows(r)] = r;
    for (int r = 0; r < k; ++r)
      if (p_of_row[r] >= rank) status_[p_.n + prow_[r]] = VarStatus::basic;
  }

  // Structural column products restricted to basic structurals.
  void accumulate_s(const Eigen::VectorXd& ds, std::vector<double>& out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t s = 0; s < basic_struct_.size(); ++s) {
      const int j = basic_struct_[s];
      if (ds(s) == 0.0) continue;
      for (int e = p_.start[j]; e < p_.start[j + 1]; ++e) out[p_.row[e]] += p_.val[e] * ds(s);
    }
  }

  void compute_values() {
    const int n = p_.n, m = p_.m;
    std::vector<double> r(m, 0.0);
    for (int j = 0; j < n; ++j) {
      if (status_[j] == VarStatus::basic) continue;
      x_[j] = nonbasic_value(j);
      if (x_[j] == 0.0) continue;
      for (int e = p_.start[j]; e < p_.start[j + 1]; ++e) r[p_.row[e]] -= p_.val[e] * x_[j];
    }
    for (int i = 0; i < m; ++i)
      if (status_[n + i] != VarStatus::basic) {
        x_[n + i] = nonbasic_value(n + i);
        r[i] += x_[n + i];
      }
    const int k = static_cast<int>(basic_struct_.size());
    Eigen::VectorXd rp(k);
    for (int t = 0; t < k; ++t) rp(t) = r[prow_[t]];
    Eigen::VectorXd xs = k ? Eigen::VectorXd(lu_.solve(rp)) : Eigen::VectorXd();
    for (int t = 0; t < k; ++t) x_[basic_struct_[t]] = xs(t);
    scratch_.resize(m);
    accumulate_s(xs, scratch_);
    for (int i = 0; i < m; ++i)
      if (status_[n + i] == VarStatus::basic) x_[n + i] = scratch_[i] - r[i];
    row_mag_.assign(m, 0.0);
    for (int j = 0; j < n; ++j) {
      if (x_[j] == 0.0) continue;
      for (int e = p_.start[j]; e < p_.start[j + 1]; ++e) row_mag_[p_.row[e]] += std::abs(p_.val[e] * x_[j]);
    }
  }

  double objective() const {
    double v = 0.0;
    for (int j = 0; j < p_.n; ++j) v += p_.cost[j] * x_[j];
    return v;
  }

  double infeasibility() const {
    double v = 0.0;
    for (int k = 0; k < p_.n + p_.m; ++k)
      if (status_[k] == VarStatus::basic) v += std::max({0.0, p_.lb[k] - x_[k], x_[k] - p_.ub[k]});
    return v;
  }

  bool set_phase_costs() {
    const int total = p_.n + p_.m;
    phase_cost_.assign(total, 0.0);
    bool infeasible = false;
    for (int k = 0; k < total; ++k) {
      if (status_[k] != VarStatus::basic) continue;
      if (x_[k] < p_.lb[k] - tol_at(k, p_.lb[k])) {
        phase_cost_[k] = -1.0;
        infeasible = true;
      } else if (x_[k] > p_.ub[k] + tol_at(k, p_.ub[k])) {
        phase_cost_[k] = 1.0;
        infeasible = true;
      }
    }
    if (!infeasible)
      for (int j = 0; j < p_.n; ++j) phase_cost_[j] = p_.cost[j];
    return infeasible;
  }

  void compute_duals() {
    const int n = p_.n, m = p_.m;
    y_.assign(m, 0.0);
    for (int i = 0; i < m; ++i)
      if (status_[n + i] == VarStatus::basic) y_[i] = -phase_cost_[n + i];
    const int k = static_cast<int>(basic_struct_.size());
    if (k == 0) return;
    Eigen::VectorXd rhs(k);
    for (int s = 0; s < k; ++s) {
      const int j = basic_struct_[s];
      double v = phase_cost_[j];
      for (int e = p_.start[j]; e < p_.start[j + 1]; ++e)
        if (pos_in_p_[p_.row[e]] < 0) v -= p_.val[e] * y_[p_.row[e]];
      rhs(s) = v;
    }
    Eigen::VectorXd yp = lu_.transpose().solve(rhs);
    for (int t = 0; t < k; ++t) y_[prow_[t]] = yp(t);
  }

  double reduced_cost(int k) const {
    if (k < p_.n) {
      double d = phase_cost_[k];
      for (int e = p_.start[k]; e < p_.start[k + 1]; ++e) d -= p_.val[e] * y_[p_.row[e]];
      return d;
    }
    return phase_cost_[k] + y_[k - p_.n];
  }

  int price(bool bland, int& sigma) const {
    int best = -1;
    double best_score = 0.0;
    for (int k = 0; k < p_.n + p_.m; ++k) {
      if (status_[k] == VarStatus::basic || fixed(k)) continue;
      const double d = reduced_cost(k);
      int dir = 0;
      if (status_[k] == VarStatus::at_lower && d < -opts_.tol_opt) dir = 1;
      if (status_[k] == VarStatus::at_upper && d > opts_.tol_opt) dir = -1;
      if (status_[k] == VarStatus::free_zero && std::abs(d) > opts_.tol_opt) dir = d < 0 ? 1 : -1;
      if (!dir) continue;
      if (bland) {
        sigma = dir;
        return k;
      }
      if (std::abs(d) > best_score) {
        best_score = std::abs(d);
        best = k;
        sigma = dir;
      }
    }
    return best;
  }

  // d = B^{-1} a_q over all basic variables, stored per variable index.
  void ftran(int q) {
    const int n = p_.n, m = p_.m;
    std::vector<double> a(m, 0.0);
    if (q < n) {
      for (int e = p_.start[q]; e < p_.start[q + 1]; ++e) a[p_.row[e]] = p_.val[e];
    } else {
      a[q - n] = -1.0;
    }
    const int k = static_cast<int>(basic_struct_.size());
    Eigen::VectorXd ap(k);
    for (int t = 0; t < k; ++t) ap(t) = a[prow_[t]];
    Eigen::VectorXd ds = k ? Eigen::VectorXd(lu_.solve(ap)) : Eigen::VectorXd();
    dir_.assign(n + m, 0.0);
    for (int t = 0; t < k; ++t) dir_[basic_struct_[t]] = ds(t);
    scratch_.resize(m);
    accumulate_s(ds, scratch_);
    for (int i = 0; i < m; ++i)
      if (status_[n + i] == VarStatus::basic) dir_[n + i] = scratch_[i] - a[i];
  }

  // Step limit for basic k moving at `rate`, with bounds widened by `relax`.
  // Returns +inf when unrestricted; `to_upper` reports the bound reached.
  double limit(int k, double rate, double relax, bool& to_upper) const {
    const double v = x_[k], lo = p_.lb[k], hi = p_.ub[k];
    if (rate < 0) {
      if (v > hi + tol_at(k, hi)) {
        to_upper = true;
        return std::max(0.0, (v - hi + relax * tol_at(k, hi)) / -rate);
      }
      if (std::isfinite(lo) && v >= lo - tol_at(k, lo)) {
        to_upper = false;
        return std::max(0.0, (v - lo + relax * tol_at(k, lo)) / -rate);
      }
    } else {
      if (v < lo - tol_at(k, lo)) {
        to_upper = false;
        return std::max(0.0, (lo - v + relax * tol_at(k, lo)) / rate);
      }
      if (std::isfinite(hi) && v <= hi + tol_at(k, hi)) {
        to_upper = true;
        return std::max(0.0, (hi - v + relax * tol_at(k, hi)) / rate);
      }
    }
    return kInf;
  }

  int ratio_test(int q, int sigma, bool bland, double& step, bool& flip) {
    const int total = p_.n + p_.m;
    const double span = p_.ub[q] - p_.lb[q];
    bool to_upper = false;

    double t_max = kInf;
    if (!bland) {
      for (int k = 0; k < total; ++k) {
        if (status_[k] != VarStatus::basic) continue;
        const double rate = -sigma * dir_[k];
        if (std::abs(rate) <= opts_.tol_pivot) continue;
        t_max = std::min(t_max, limit(k, rate, 0.5, to_upper));
      }
    }

    int leave = -1;
    double best = bland ? kInf : 0.0;
    step = kInf;
    for (int k = 0; k < total; ++k) {
      if (status_[k] != VarStatus::basic) continue;
      const double rate = -sigma * dir_[k];
      if (std::abs(rate) <= opts_.tol_pivot) continue;
      const double t = limit(k, rate, 0.0, to_upper);
      if (!std::isfinite(t)) continue;
      if (bland) {
        if (t < best) {
          best = t;
          leave = k;
          leave_to_upper_ = to_upper;
        }
      } else if (t <= t_max && std::abs(rate) > best) {
        best = std::abs(rate);
        leave = k;
        leave_to_upper_ = to_upper;
        step = t;
      }
    }
    if (bland) step = best;

    flip = std::isfinite(span) && span <= step;
    if (flip) {
      step = span;
      return -1;
    }
    return leave;
  }

  const Scaled& p_;
  const SolveOptions& opts_;
  std::vector<VarStatus> status_;
  std::vector<double> x_, y_, dir_, phase_cost_, scratch_, row_mag_;
  std::vector<int> basic_struct_, prow_, pos_in_p_;
  Eigen::MatrixXd kernel_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  bool leave_to_upper_ = false;
};

LpSolution solve_once(const LinearProgram& lp, const SolveOptions& opts) {
  const Scaled scaled = build(lp, opts.scaling);
  Simplex simplex(scaled, opts);
  LpSolution out;
  try {
    out.status = simplex.run(out.iterations);
  } catch (const std::runtime_error&) {
    out.status = Status::numerical_failure;
  }

  const auto& x = simplex.values();
  out.values.resize(scaled.n);
  for (int j = 0; j < scaled.n; ++j) {
    double v = x[j] * scaled.col_scale[j];
    // Nonbasic values sit exactly on their bound in the original units.
    const auto st = simplex.statuses()[j];
    if (st == VarStatus::at_lower) v = lp.variable(j).lower;
    if (st == VarStatus::at_upper) v = lp.variable(j).upper;
    out.values[j] = v;
  }
  out.basis.columns.assign(simplex.statuses().begin(), simplex.statuses().begin() + scaled.n);
  out.basis.rows.assign(simplex.statuses().begin() + scaled.n, simplex.statuses().end());
  double obj = 0.0;
  for (const auto& t : lp.objective()) obj += t.coef * out.values[t.var];
  out.objective_value = obj;
  return out;
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const SolveOptions& opts) {
  if (!(opts.tol_feas > 0.0)) throw PreconditionError("solve_lp: tol_feas must be positive");
  LpSolution out = solve_once(lp, opts);
  // Tiny admissible pivots are what drive the basis singular; retry with
  // pickier ones before giving up.
  SolveOptions pickier = opts;
  for (int retry = 0; retry < 2 && out.status == Status::numerical_failure; ++retry) {
    pickier.tol_pivot *= 100;
    const int spent = out.iterations;
    out = solve_once(lp, pickier);
    out.iterations += spent;
  }
  if (out.optimal() && opts.scaling && !check_feasible(lp, out.values, opts.tol_feas).feasible()) {
    // Scaled tolerances can leave small residuals in original units; polish
    // from the final basis without scaling.
    SolveOptions polish = opts;
    polish.scaling = false;
    polish.warm_start = &out.basis;
    LpSolution again = solve_once(lp, polish);
    again.iterations += out.iterations;
    if (again.optimal()) return again;
  }
  return out;
}

LpSolution solve_lp(const LinearProgram& lp, double tol_feas, int max_iters) {
  SolveOptions opts;
  opts.tol_feas = tol_feas;
  opts.max_iters = max_iters;
  return solve_lp(lp, opts);
}

}  // namespace mis::lp

#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace mis::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { le, eq, ge };
enum class Sense { minimize, maximize };
enum class Status { optimal, infeasible, unbounded, iteration_limit, numerical_failure };

const char* to_string(Status s);
const char* to_string(Relation r);

struct Term {
  int var;
  double coef;
};

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;  // sorted by var, no duplicates, no zeros
  Relation rel = Relation::le;
  double rhs = 0.0;
};

/// Sparse-row LP with bounded variables. Values are immutable once handed to
/// the solver; building is append-only.
class LinearProgram {
 public:
  /// Throws PreconditionError when lower > upper or the name is taken.
  int add_variable(std::string name, double lower = 0.0, double upper = kInf);
  /// Duplicate variable references are merged, zero coefficients dropped.
  int add_constraint(std::string name, std::vector<Term> terms, Relation rel, double rhs);
  void set_objective(Sense sense, std::vector<Term> terms);
  void set_bounds(int var, double lower, double upper);

  int num_variables() const { return static_cast<int>(vars_.size()); }
  int num_constraints() const { return static_cast<int>(rows_.size()); }
  const Variable& variable(int j) const { return vars_[j]; }
  const std::vector<Variable>& variables() const { return vars_; }
  const Constraint& constraint(int i) const { return rows_[i]; }
  const std::vector<Constraint>& constraints() const { return rows_; }
  Sense sense() const { return sense_; }
  const std::vector<Term>& objective() const { return objective_; }

  std::optional<int> find_variable(const std::string& name) const;
  std::optional<int> find_constraint(const std::string& name) const;
  int variable_index(const std::string& name) const;  // throws if absent

  /// One line per row, e.g. "W2: 2 a1 + 1 a2 - 1 func1 >= 30". Debug only.
  std::string to_text() const;

 private:
  std::vector<Term> normalize(std::vector<Term> terms) const;

  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
  std::unordered_map<std::string, int> var_index_;
  std::unordered_map<std::string, int> row_index_;
  Sense sense_ = Sense::minimize;
  std::vector<Term> objective_;
};

enum class VarStatus : unsigned char { basic, at_lower, at_upper, free_zero };

/// Simplex basis over structurals followed by one logical per row; usable as
/// a warm start for a program of the same shape.
struct Basis {
  std::vector<VarStatus> columns;
  std::vector<VarStatus> rows;
  bool empty() const { return columns.empty() && rows.empty(); }
};

struct SolveOptions {
  double tol_feas = 1e-8;
  double tol_pivot = 1e-10;
  double tol_opt = 1e-9;
  int max_iters = 200000;
  bool scaling = true;
  /// Consecutive pivots without progress tolerated before switching to Bland's rule.
  int bland_after = 50;
  const Basis* warm_start = nullptr;
};

struct LpSolution {
  Status status = Status::infeasible;
  std::vector<double> values;  // per structural, unscaled
  double objective_value = 0.0;
  int iterations = 0;
  Basis basis;

  bool optimal() const { return status == Status::optimal; }
};

/// Bounded-variable primal simplex. Deterministic: identical input yields
/// bit-identical output. A numerical failure is retried twice, each time with
/// tol_pivot raised a hundredfold.
LpSolution solve_lp(const LinearProgram& lp, const SolveOptions& opts = {});
LpSolution solve_lp(const LinearProgram& lp, double tol_feas, int max_iters);

struct Violation {
  enum class Kind { constraint, lower_bound, upper_bound };
  Kind kind;
  int index;  // row or variable index
  std::string name;
  double slack;  // negative: amount by which the requirement is missed
  double activity;
};

struct FeasibilityReport {
  std::vector<Violation> violations;
  bool feasible() const { return violations.empty(); }
  std::string to_string() const;
};

/// A row is violated when its slack is below -tol * max(1, |rhs|, max_j |a_j x_j|);
/// a bound when the miss exceeds tol * max(1, |bound|).
FeasibilityReport check_feasible(const LinearProgram& lp, const std::vector<double>& point, double tol);
/// Throws PreconditionError naming the first unassigned variable.
FeasibilityReport check_feasible(const LinearProgram& lp, const std::map<std::string, double>& point, double tol);

/// Row activity sum a_j x_j evaluated with compensated summation.
double activity(const Constraint& row, const std::vector<double>& point);

}  // namespace mis::lp

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mis/errors.hpp"
#include "mis/kvfile.hpp"
#include "mis/lp.hpp"

namespace mis::lp {

const char* to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::iteration_limit: return "iteration-limit";
    case Status::numerical_failure: return "numerical-failure";
  }
  return "?";
}

const char* to_string(Relation r) {
  switch (r) {
    case Relation::le: return "<=";
    case Relation::eq: return "=";
    case Relation::ge: return ">=";
  }
  return "?";
}

int LinearProgram::add_variable(std::string name, double lower, double upper) {
  if (std::isnan(lower) || std::isnan(upper) || lower > upper)
    throw PreconditionError("variable '" + name + "': lower bound exceeds upper bound");
  if (var_index_.count(name)) throw PreconditionError("duplicate variable '" + name + "'");
  const int id = static_cast<int>(vars_.size());
  var_index_.emplace(name, id);
  vars_.push_back({std::move(name), lower, upper});
  return id;
}

void LinearProgram::set_bounds(int var, double lower, double upper) {
  if (var < 0 || var >= num_variables()) throw PreconditionError("set_bounds: unknown variable");
  if (std::isnan(lower) || std::isnan(upper) || lower > upper)
    throw PreconditionError("variable '" + vars_[var].name + "': lower bound exceeds upper bound");
  vars_[var].lower = lower;
  vars_[var].upper = upper;
}

std::vector<Term> LinearProgram::normalize(std::vector<Term> terms) const {
  for (const auto& t : terms) {
    if (t.var < 0 || t.var >= num_variables()) throw PreconditionError("term references an undeclared variable");
    if (!std::isfinite(t.coef)) throw PreconditionError("non-finite coefficient on '" + vars_[t.var].name + "'");
  }
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> out;
  for (const auto& t : terms) {
    if (!out.empty() && out.back().var == t.var)
      out.back().coef += t.coef;
    else
      out.push_back(t);
  }
  std::erase_if(out, [](const Term& t) { return t.coef == 0.0; });
  return out;
}

int LinearProgram::add_constraint(std::string name, std::vector<Term> terms, Relation rel, double rhs) {
  if (!std::isfinite(rhs)) throw PreconditionError("constraint '" + name + "': non-finite right-hand side");
  if (row_index_.count(name)) throw PreconditionError("duplicate constraint '" + name + "'");
  const int id = static_cast<int>(rows_.size());
  row_index_.emplace(name, id);
  rows_.push_back({std::move(name), normalize(std::move(terms)), rel, rhs});
  return id;
}

void LinearProgram::set_objective(Sense sense, std::vector<Term> terms) {
  sense_ = sense;
  objective_ = normalize(std::move(terms));
}

std::optional<int> LinearProgram::find_variable(const std::string& name) const {
  auto it = var_index_.find(name);
  if (it == var_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> LinearProgram::find_constraint(const std::string& name) const {
  auto it = row_index_.find(name);
  if (it == row_index_.end()) return std::nullopt;
  return it->second;
}

int LinearProgram::variable_index(const std::string& name) const {
  if (auto j = find_variable(name)) return *j;
  throw PreconditionError("unknown variable '" + name + "'");
}

namespace {

void append_terms(std::string& out, const std::vector<Term>& terms, const std::vector<Variable>& vars) {
  if (terms.empty()) {
    out += "0";
    return;
  }
  for (std::size_t i = 0; i < terms.size(); ++i) {
    double c = terms[i].coef;
    if (i) {
      out += c < 0 ? " - " : " + ";
      c = std::abs(c);
    }
    out += format_double(c) + " " + vars[terms[i].var].name;
  }
}

std::string bound_text(double v) { return std::isinf(v) ? (v > 0 ? "inf" : "-inf") : format_double(v); }

}  // namespace

std::string LinearProgram::to_text() const {
  std::string out = sense_ == Sense::minimize ? "minimize: " : "maximize: ";
  append_terms(out, objective_, vars_);
  out += "\n";
  for (const auto& row : rows_) {
    out += row.name + ": ";
    append_terms(out, row.terms, vars_);
    out += std::string(" ") + lp::to_string(row.rel) + " " + format_double(row.rhs) + "\n";
  }
  for (const auto& v : vars_) out += "bounds " + v.name + " in [" + bound_text(v.lower) + ", " + bound_text(v.upper) + "]\n";
  return out;
}

double activity(const Constraint& row, const std::vector<double>& point) {
  // Neumaier summation: rows mix terms across many orders of magnitude.
  double sum = 0.0, comp = 0.0;
  for (const auto& t : row.terms) {
    const double v = t.coef * point[t.var];
    const double s = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - s) + v : (v - s) + sum;
    sum = s;
  }
  return sum + comp;
}

FeasibilityReport check_feasible(const LinearProgram& lp, const std::vector<double>& point, double tol) {
  if (static_cast<int>(point.size()) != lp.num_variables())
    throw PreconditionError("check_feasible: point has " + std::to_string(point.size()) + " values for " +
                            std::to_string(lp.num_variables()) + " variables");
  FeasibilityReport report;
  for (int j = 0; j < lp.num_variables(); ++j) {
    const auto& v = lp.variable(j);
    const double x = point[j];
    if (std::isnan(x)) {
      report.violations.push_back({Violation::Kind::lower_bound, j, v.name, -kInf, x});
      continue;
    }
    if (x < v.lower - tol * std::max(1.0, std::abs(v.lower)))
      report.violations.push_back({Violation::Kind::lower_bound, j, v.name, x - v.lower, x});
    if (x > v.upper + tol * std::max(1.0, std::abs(v.upper)))
      report.violations.push_back({Violation::Kind::upper_bound, j, v.name, v.upper - x, x});
  }
  for (int i = 0; i < lp.num_constraints(); ++i) {
    const auto& row = lp.constraint(i);
    const double act = activity(row, point);
    double magnitude = std::max(1.0, std::abs(row.rhs));
    for (const auto& t : row.terms) magnitude = std::max(magnitude, std::abs(t.coef * point[t.var]));
    const double limit = -tol * magnitude;
    double slack = 0.0;
    switch (row.rel) {
      case Relation::le: slack = row.rhs - act; break;
      case Relation::ge: slack = act - row.rhs; break;
      case Relation::eq: slack = -std::abs(act - row.rhs); break;
    }
    if (!(slack >= limit)) report.violations.push_back({Violation::Kind::constraint, i, row.name, slack, act});
  }
  return report;
}

FeasibilityReport check_feasible(const LinearProgram& lp, const std::map<std::string, double>& point, double tol) {
  std::vector<double> dense(lp.num_variables());
  for (int j = 0; j < lp.num_variables(); ++j) {
    auto it = point.find(lp.variable(j).name);
    if (it == point.end()) throw PreconditionError("unassigned variable '" + lp.variable(j).name + "'");
    dense[j] = it->second;
  }
  return check_feasible(lp, dense, tol);
}

std::string FeasibilityReport::to_string() const {
  std::ostringstream out;
  for (const auto& v : violations) {
    const char* kind = v.kind == Violation::Kind::constraint ? "row"
                       : v.kind == Violation::Kind::lower_bound ? "lower bound"
                                                                : "upper bound";
    out << kind << " " << v.name << ": slack " << v.slack << "\n";
  }
  return out.str();
}

}  // namespace mis::lp

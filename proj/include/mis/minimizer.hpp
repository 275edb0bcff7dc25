#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mis/costfn.hpp"
#include "mis/graph.hpp"

namespace mis::minimizer {

/// The relaxed polytope: x_i + x_j <= 1 + w on edges, sum x = k + (N - k) w,
/// w <= x_j <= 1, and x_j = 1 on fixed_ones.
struct PolytopeSpec {
  Graph graph;
  int k = 0;
  double w = 0;
  VertexSet fixed_ones;
  /// Accepted |objective - desired cost| for an integer-found verdict.
  double band = 0;

  PolytopeSpec() = default;
  /// Throws PreconditionError when fixed_ones is dependent or out of range,
  /// k is outside 0..N, or w is outside [0, 1).
  PolytopeSpec(Graph g, int k, double w, VertexSet fixed_ones = {}, double band = 0);

  double target_sum() const { return k + (graph.n() - k) * w; }
};

struct MinimizeOptions {
  int max_iters = 5000;
  /// Stop when the Frank-Wolfe gap is <= gap_tol * max(1, |gradient|_inf).
  /// The objective itself is no yardstick: fitted functions carry constant
  /// offsets near 1e10 that say nothing about the slope.
  double gap_tol = 1e-6;
  bool away_steps = true;
  /// Exterior quadratic penalties for x_i x_j <= ((1+w)/2)^2 - epsilon_cut and
  /// x_i x_j <= w on every edge, weight mu0 * mu_growth^t over penalty_rounds.
  /// The products sit near 1e-3 when violated, so squared violations of 1e-6
  /// against cost separations of order eps (tens) call for mu0 around 1e2.
  bool nonlinear_cuts = false;
  double epsilon_cut = 1e-3;
  double mu0 = 100.0;
  double mu_growth = 10.0;
  int penalty_rounds = 4;
  /// Seeded random-objective vertices averaged into the starting point.
  int start_vertices = 8;
  std::uint64_t seed = 1;
  double tol_feas = 1e-8;
  /// Rounding margin above (1+w)/2; negative selects 10 * tol_feas, raised
  /// to the assignment's feasibility residual when that is larger.
  double margin = -1;
};

enum class RunStatus { converged, not_converged, infeasible, numerical_failure };
const char* to_string(RunStatus s);

struct FractionalAssignment {
  std::vector<double> values;  // values[j - 1] for vertex j
  double objective = 0;        // sum f(x_j), penalties excluded
  double penalty = 0;
  double fw_gap = 0;
  int iterations = 0;
  double residual = 0;  // largest bound / edge / sum violation
  RunStatus status = RunStatus::converged;
  std::string note;

  double value(VertexId j) const { return values[j - 1]; }
  /// "j value" per line, sorted by j.
  std::string dump() const;
};

/// Conditional-gradient minimisation of sum f(x_j) over the polytope. Linear
/// subproblems go through lpcore; the line search bisects the directional
/// derivative and keeps the best of that point and the segment ends. Throws
/// DomainError naming the vertex when f cannot be evaluated.
FractionalAssignment minimize(const PolytopeSpec& spec, const cost::CostParams& params,
                              const MinimizeOptions& opts = {});

/// Vertices with x_t > (1 + w)/2 + margin; absent unless they form an
/// independent set of exactly k vertices.
std::optional<VertexSet> round_solution(const FractionalAssignment& a, const Graph& g, int k, double w,
                                        double margin);

enum class OutcomeStatus { integer_found, fractional, infeasible, not_converged, numerical_failure };
const char* to_string(OutcomeStatus s);

struct SolveOutcome {
  FractionalAssignment assignment;
  std::optional<VertexSet> recognized;
  OutcomeStatus status = OutcomeStatus::fractional;
  double desired_cost = 0;
  /// True when f'' < 0 somewhere on a 1001-point grid of [w, 1]: the
  /// minimiser then only finds a stationary point, with no certificate.
  bool best_effort = false;
};

/// minimize, then round_solution; integer-found needs both recognition and
/// |objective - desired_cost| <= band + 1e-12 * max(1, |desired_cost|).
SolveOutcome solve_step_b(const PolytopeSpec& spec, const cost::CostParams& params,
                          const MinimizeOptions& opts = {});

}  // namespace mis::minimizer

#include <doctest.h>

#include <cmath>

#include "grid_oracle.hpp"
#include "mis/errors.hpp"
#include "mis/exact.hpp"
#include "mis/minimizer.hpp"
#include "mis/paramfit.hpp"
#include "mis/rng.hpp"
#include "test_support.hpp"

using namespace mis;
using namespace mis::minimizer;

namespace {

Graph complete(int n) {
  std::vector<Edge> edges;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) edges.push_back({i, j});
  return Graph(n, edges);
}

cost::CostParams quadratic(double a1, double a2, double w) {
  cost::PolyParams p;
  p.a1 = a1;
  p.a2 = a2;
  p.w = w;
  return p;
}

cost::CostParams fitted(int N, int k, long long lowCurv) {
  fit::FitConfig cfg;
  cfg.N = N;
  cfg.k = k;
  cfg.lowCurv = lowCurv;
  cfg.convexity = false;
  auto r = fit::fit_parameters(cfg);
  REQUIRE(r.ok());
  return *r.params;
}

FractionalAssignment assignment(std::vector<double> values) {
  FractionalAssignment a;
  a.values = std::move(values);
  return a;
}

}  // namespace

TEST_CASE("polytope validation") {
  const Graph g(3, {{1, 2}});
  CHECK_THROWS_AS(PolytopeSpec(g, 4, 0.1), PreconditionError);
  CHECK_THROWS_AS(PolytopeSpec(g, 1, 1.0), PreconditionError);
  CHECK_THROWS_AS(PolytopeSpec(g, 1, 0.1, {1, 2}), PreconditionError);
  CHECK_THROWS_AS(PolytopeSpec(g, 1, 0.1, {4}), PreconditionError);
  CHECK(PolytopeSpec(g, 2, 0.1).target_sum() == doctest::Approx(2.1));
}

TEST_CASE("edgeless graph reaches the integer placement") {
  const Graph g(6, {});
  const auto p = fitted(6, 2, 500);
  const double w = cost::floor_size(p);
  MinimizeOptions opts;
  opts.nonlinear_cuts = true;
  const auto out = solve_step_b(PolytopeSpec(g, 2, w, {}, 1000), p, opts);
  double sum = 0;
  for (double v : out.assignment.values) sum += v;
  CHECK(sum == doctest::Approx(2 + 4 * w).epsilon(1e-9));
  CHECK(out.status == OutcomeStatus::integer_found);
  REQUIRE(out.recognized);
  CHECK(out.recognized->size() == 2);
  CHECK(std::abs(out.assignment.objective - out.desired_cost) <= 1000);
}

TEST_CASE("convex quadratic on a triangle matches grid search") {
  const Graph tri(3, {{1, 2}, {1, 3}, {2, 3}});
  const double w = 0.05;
  const auto p = quadratic(-0.3, 1.0, w);
  MinimizeOptions opts;
  opts.gap_tol = 1e-6;
  const auto a = minimize(PolytopeSpec(tri, 1, w), p, opts);
  CHECK(a.status == RunStatus::converged);
  CHECK(std::abs(a.objective - test::grid_minimum(tri, 1, w, p)) <= 1e-4);
  CHECK(a.residual <= 1e-7);
}

TEST_CASE("k = 0 is the all-floor point") {
  const auto g = test::appendix_b();
  const auto p = quadratic(0, 1, 0.02);
  const auto a = minimize(PolytopeSpec(g, 0, 0.02), p);
  for (double v : a.values) CHECK(v == doctest::Approx(0.02));
  const auto r = round_solution(a, g, 0, 0.02, 1e-7);
  REQUIRE(r);
  CHECK(r->empty());
}

TEST_CASE("rounding examples") {
  const auto g = test::appendix_b();
  std::vector<double> x(25, 0.005);
  for (int j : {14, 23, 24, 25}) x[j - 1] = 1;
  const auto r = round_solution(assignment(x), g, 4, 0.005, 1e-7);
  REQUIRE(r);
  CHECK(*r == VertexSet{14, 23, 24, 25});

  const Graph edge(2, {{1, 2}});
  const double w = 0.1;
  const auto e = round_solution(assignment({0.75 * (1 + w), 0.25 * (1 + w)}), edge, 1, w, 1e-7);
  REQUIRE(e);
  CHECK(*e == VertexSet{1});

  CHECK_FALSE(round_solution(assignment(x), g, 3, 0.005, 1e-7));
}

TEST_CASE("rounding never returns a dependent set") {
  SplitMix64 rng(31);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 4 + static_cast<int>(rng.below(10));
    const auto g = random_graph(n, 0.4, rng.next());
    const double w = rng.uniform(0, 0.2), delta = rng.uniform(0, 0.05);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.uniform(w, 1);
    // push edge sums down to at most 1 + w + delta
    for (const auto& e : g.edges()) {
      double& a = x[e.u - 1];
      double& b = x[e.v - 1];
      const double over = a + b - (1 + w + delta);
      if (over > 0) (rng.below(2) ? a : b) -= over;
    }
    for (int k = 0; k <= n; ++k)
      if (auto s = round_solution(assignment(x), g, k, w, delta)) CHECK(is_independent(g, *s));
  }
}

TEST_CASE("fixed vertices stay at one") {
  const auto g = test::appendix_b();
  const auto p = fitted(25, 4, 500);
  MinimizeOptions opts;
  opts.nonlinear_cuts = true;
  const auto out = solve_step_b(PolytopeSpec(g, 4, 0.005, {3}, 1000), p, opts);
  CHECK(out.assignment.value(3) == doctest::Approx(1.0).epsilon(1e-9));
  for (const auto& e : g.edges())
    CHECK(out.assignment.value(e.u) + out.assignment.value(e.v) <= 1.005 + 1e-7);
}

TEST_CASE("complete graph never yields two independent vertices") {
  const auto g = complete(4);
  const auto p = fitted(4, 2, 500);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    MinimizeOptions opts;
    opts.seed = seed;
    opts.nonlinear_cuts = seed % 2 == 0;
    const auto out = solve_step_b(PolytopeSpec(g, 2, 0.005, {}, 1e9), p, opts);
    CHECK(out.status != OutcomeStatus::integer_found);
    CHECK_FALSE(out.recognized);
  }
}

TEST_CASE("empty polytope is reported as infeasible") {
  // Four vertices fixed at one cannot fit a sum of k = 3.
  const Graph g(5, {});
  const auto out = solve_step_b(PolytopeSpec(g, 3, 0.01, {1, 2, 3, 4}), quadratic(0, 1, 0.01));
  CHECK(out.status == OutcomeStatus::infeasible);
}

TEST_CASE("iterates stay feasible and runs are deterministic") {
  const auto g = random_graph(12, 0.3, 8);
  const auto p = quadratic(0.2, 1.0, 0.03);
  const PolytopeSpec spec(g, 3, 0.03);
  const auto a = minimize(spec, p), b = minimize(spec, p);
  CHECK(a.values == b.values);
  CHECK(a.residual <= 100 * 1e-8 * spec.target_sum());
  double sum = 0;
  for (double v : a.values) {
    sum += v;
    CHECK(v >= 0.03 - 1e-9);
    CHECK(v <= 1 + 1e-9);
  }
  CHECK(sum == doctest::Approx(spec.target_sum()).epsilon(1e-9));
}

TEST_CASE("concave functions are marked best effort") {
  const auto g = Graph(4, {{1, 2}});
  const auto out = solve_step_b(PolytopeSpec(g, 1, 0.01), quadratic(0, -1, 0.01));
  CHECK(out.best_effort);
  const auto convex = solve_step_b(PolytopeSpec(g, 1, 0.01), quadratic(0, 1, 0.01));
  CHECK_FALSE(convex.best_effort);
}

TEST_CASE("dump lists every vertex") {
  const auto text = assignment({0.5, 1.0}).dump();
  CHECK(text.find("1 0.5") != std::string::npos);
  CHECK(text.find("2 1") != std::string::npos);
}

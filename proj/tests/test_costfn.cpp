#include <doctest.h>

#include <cmath>

#include "mis/costfn.hpp"
#include "mis/errors.hpp"
#include "mis/rng.hpp"
#include "mis/scenarios.hpp"
#include "test_support.hpp"

using namespace mis;
using namespace mis::cost;

namespace {

// High-precision values from tests/oracles/highprec_values.py.
constexpr long double kSec363AtOne = 99999999.99999999075342L;
constexpr long double kTable1Desired = 14871034372.5931985389268075192L;

long double fd_first(const CostParams& p, long double x, long double h) {
  return (eval_ld(p, x + h) - eval_ld(p, x - h)) / (2 * h);
}

long double fd_second(const CostParams& p, long double x, long double h) {
  return (eval_ld(p, x + h) - 2 * eval_ld(p, x) + eval_ld(p, x - h)) / (h * h);
}

bool close(long double analytic, long double numeric, double rel) {
  return std::abs(analytic - numeric) <= rel * std::max<long double>(1, std::abs(analytic));
}

CostParams random_params(SplitMix64& rng, Family fam) {
  std::vector<double> c(coefficient_names(fam).size());
  for (auto& v : c) v = rng.uniform(-1, 1);
  return from_coefficients(fam, c, 0.01);
}

CostParams sec34_legacy() {
  LegacyParams p;
  p.p = 2;
  p.t = 268.435456;
  p.M = 1.048576;
  p.r = 268.435456;
  p.s = 0.000001;
  p.y = -0.000064;
  p.w = 0.000001;
  return p;
}

}  // namespace

TEST_CASE("constant and linear values") {
  PolyParams c;
  c.C = 5;
  CHECK(eval(c, 0.3) == 5);
  PolyParams l;
  l.C = 1;
  l.a1 = 2;
  CHECK(eval(l, 0.5) == 2);
}

TEST_CASE("printed coefficients evaluated against the high-precision value") {
  const auto p = read_params(test::data("sec363.params"));
  // Inputs carry double rounding of about 1.5e-8 at this magnitude.
  CHECK(std::abs(eval_ld(p, 1.0L) - kSec363AtOne) < 3e-8L);
}

TEST_CASE("second derivative basics") {
  PolyParams q;
  q.a2 = 1;
  for (double x : {0.1, 0.5, 0.9}) CHECK(second_derivative(q, x) == doctest::Approx(2));
  PolyParams quart;
  quart.a4 = 1;
  CHECK(second_derivative(quart, 0.5) == doctest::Approx(3));
}

TEST_CASE("derivatives match central differences") {
  SplitMix64 rng(99);
  for (Family fam : {Family::poly, Family::frac}) {
    for (int draw = 0; draw < 100; ++draw) {
      const auto p = random_params(rng, fam);
      const long double x = 0.1L + 0.1L * static_cast<long double>(draw % 9);
      CHECK(close(first_derivative(p, static_cast<double>(x)), fd_first(p, x, 1e-5L), 1e-5));
      CHECK(close(second_derivative(p, static_cast<double>(x)), fd_second(p, x, 1e-4L), 1e-5));
    }
  }
  for (int draw = 0; draw < 50; ++draw) {
    LegacyParams p;
    p.p = rng.uniform(1, 2);
    p.t = rng.uniform(1, 10);
    p.M = rng.uniform(0, 5);
    p.r = rng.uniform(0, 5);
    p.s = rng.uniform(0.01, 0.1);
    p.y = rng.uniform(-0.01, 0.01);
    const long double x = rng.uniform(0.1, 0.9);
    CHECK(close(first_derivative(p, static_cast<double>(x)), fd_first(p, x, 1e-5L), 1e-5));
    CHECK(close(second_derivative(p, static_cast<double>(x)), fd_second(p, x, 1e-4L), 1e-5));
  }
}

TEST_CASE("poles raise domain errors") {
  PolyParams p;
  p.b1 = 1;
  CHECK_THROWS_AS(eval(p, 0.0), DomainError);
  FracParams f;
  f.b2 = 1;
  CHECK_THROWS_AS(eval(f, -0.1), DomainError);
  LegacyParams l;
  l.p = 1.5;
  l.t = -1;
  CHECK_THROWS_AS(eval(l, 0.5), DomainError);
}

TEST_CASE("convexity measure examples") {
  PolyParams convex;
  convex.a2 = 1;
  const auto a = convexity_measure(convex, 0, 1, 1000);
  CHECK(a.numerator == 1000);
  CHECK(a.denominator == 1000);
  PolyParams concave;
  concave.C = 1e6;
  concave.a2 = -1;
  CHECK(convexity_measure(concave, 0, 1, 1000, 0).numerator == 0);
  const auto legacy = convexity_measure(sec34_legacy(), 0.000001, 1, 1000);
  CHECK(legacy.numerator >= 980);
}

TEST_CASE("desired cost") {
  PolyParams c;
  c.C = 3;
  c.w = 0.1;
  for (int k : {0, 2, 5}) CHECK(desired_cost(c, 5, k) == doctest::Approx(15));
  PolyParams p;
  p.a2 = 1;
  p.w = 0.2;
  CHECK(desired_cost(p, 6, 0) == doctest::Approx(6 * 0.04));
  const auto t1 = read_params(test::data("table1.params"));
  const double d = desired_cost(t1, 150, 20);
  CHECK(std::abs(static_cast<long double>(d) - kTable1Desired) < 1e-5L * 150);
}

TEST_CASE("params text round trip") {
  for (const char* name : {"sec362.params", "sec363.params", "table1.params"}) {
    const auto p = read_params(test::data(name));
    CHECK(coefficients(parse_params(format_params(p))) == coefficients(p));
    CHECK(floor_size(parse_params(format_params(p))) == floor_size(p));
  }
  const auto legacy = sec34_legacy();
  CHECK(family_of(parse_params(format_params(legacy))) == Family::legacy);
}

TEST_CASE("constant function scenarios") {
  PolyParams c;
  c.C = 7;
  c.w = 0.01;
  const ScenarioQuantities q{25, 4, 0.01};
  for (const auto& s : enumerate_scenarios(q, {})) {
    if (s.kind == ScenarioKind::equal_split && s.m == 2) CHECK(scenario_cost(c, s) == doctest::Approx(14));
  }
  // With the floor kept in every bin a constant f prices each breakup
  // exactly like the integer placement.
  for (const auto& s : enumerate_scenarios(q, {true, true, false})) {
    if (s.active) CHECK(scenario_cost(c, s) == doctest::Approx(scenario_reference(c, q, s)).epsilon(1e-12));
  }
}

TEST_CASE("two-piece split at one half equals the two-way split") {
  SplitMix64 rng(5);
  for (int draw = 0; draw < 20; ++draw) {
    const auto p = random_params(rng, Family::poly);
    const Placement v{{{1.0, 0.5}, {1.0, 0.5}}};
    const auto w2 = enumerate_scenarios({25, 4, 0.01}, {})[1 + 7 + 6];
    REQUIRE(w2.name == "W2");
    CHECK(static_cast<double>(v.cost(p)) == doctest::Approx(scenario_cost(p, w2)));
  }
}

TEST_CASE("scenario guards") {
  const auto all = enumerate_scenarios({25, 4, 0.005}, {});
  auto find = [&](const std::string& name) {
    for (const auto& s : all)
      if (s.name == name) return s;
    FAIL("missing " << name);
    return Scenario{};
  };
  CHECK(find("Nkw2Diff").active);
  CHECK_FALSE(find("Nkw12Diff").active);
  for (const auto& s : enumerate_scenarios({8, 4, 0.01}, {}))
    if (s.kind == ScenarioKind::redistribute) CHECK_FALSE(s.active);
  CHECK_THROWS_AS(scenario_cost(PolyParams{}, find("Nkw12Diff")), PreconditionError);

  const auto tight = enumerate_scenarios({150, 20, 0.008}, {true, true, false});
  bool eight = false;
  for (const auto& s : tight) {
    if (s.name == "EightPieceDiff") {
      eight = true;
      CHECK(s.floors == 7);
    }
    if (s.name == "W3") CHECK(s.floors == 2);
  }
  CHECK(eight);
}

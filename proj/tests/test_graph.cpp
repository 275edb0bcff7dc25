#include <doctest.h>

#include <fstream>
#include <sstream>

#include "mis/errors.hpp"
#include "mis/exact.hpp"
#include "mis/graph.hpp"
#include "mis/kvfile.hpp"
#include "test_support.hpp"

using namespace mis;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Graph complete(int n) {
  std::vector<Edge> edges;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) edges.push_back({i, j});
  return Graph(n, edges);
}

}  // namespace

TEST_CASE("edge list parses the 25-vertex instance") {
  const auto g = test::appendix_b();
  CHECK(g.n() == 25);
  CHECK(g.edge_count() == 199);
  CHECK(g.adjacent(1, 3));
  CHECK(g.adjacent(22, 25));
  CHECK_FALSE(g.adjacent(3, 4));
}

TEST_CASE("edge list without pairs") {
  const auto g = parse_edge_list("n=4;").graph;
  CHECK(g.n() == 4);
  CHECK(g.edge_count() == 0);
}

TEST_CASE("edge list collapses duplicates") {
  const auto parsed = parse_edge_list("n=3; (1,2)(2,1)(1,2);");
  CHECK(parsed.graph.edge_count() == 1);
  CHECK(parsed.graph.edges()[0] == Edge{1, 2});
  CHECK(parsed.graph.duplicates_dropped() == 2);
}

TEST_CASE("dimacs basics") {
  const auto g = parse_dimacs("p edge 3 2\ne 1 2\ne 2 3").graph;
  CHECK(g.n() == 3);
  CHECK(g.edges() == std::vector<Edge>{{1, 2}, {2, 3}});

  const auto dup = parse_dimacs("p edge 2 1\ne 1 2\ne 2 1");
  CHECK(dup.graph.edge_count() == 1);
  CHECK(dup.warnings.size() == 1);
}

TEST_CASE("parse errors carry line numbers") {
  try {
    parse_dimacs("c header\np edge 3 1\ne 1 x\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  try {
    parse_dimacs("p edge 3 1\ne 1 4\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_edge_list("n=3; (1,1);"), ParseError);
  CHECK_THROWS_AS(parse_edge_list("(1,2);"), ParseError);
}

TEST_CASE("format is detected from the first token") {
  CHECK(parse_graph("c x\np edge 2 1\ne 1 2\n").graph.edge_count() == 1);
  CHECK(parse_graph("# x\nn=2; (1,2);").graph.edge_count() == 1);
}

TEST_CASE("dimacs round trip over seeded graphs") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto g = random_graph(15, 0.35, seed);
    CHECK(parse_dimacs(emit_dimacs(g)).graph == g);
    CHECK(parse_graph(emit_dimacs(g)).graph == g);
  }
}

TEST_CASE("random graph extremes") {
  CHECK(random_graph(5, 0.0, 7).edge_count() == 0);
  CHECK(random_graph(5, 1.0, 7).edge_count() == 10);
  CHECK(random_graph(20, 0.3, 42) == random_graph(20, 0.3, 42));
}

TEST_CASE("random graph matches the frozen fixture") {
  const auto g = random_graph(20, 0.3, 42);
  CHECK(emit_dimacs(g) == slurp(test::data("random_n20_p03_s42.dimacs")));
  // alpha of the fixture by exhaustive enumeration in the oracle script
  CHECK(exact_mis(g).alpha == 7);
}

TEST_CASE("independence checks") {
  const auto g = test::appendix_b();
  CHECK(is_independent(g, {3, 4, 7, 22}));
  CHECK(is_independent(g, {}));
  CHECK_FALSE(is_independent(Graph(2, {{1, 2}}), {1, 2}));
  CHECK_THROWS_AS(is_independent(g, {26}), PreconditionError);
  CHECK_THROWS_AS(Graph(3, {{1, 1}}), PreconditionError);
}

TEST_CASE("vertex set text") {
  CHECK(VertexSet::parse(" 22, 3,4 ,7") == VertexSet{3, 4, 7, 22});
  CHECK(VertexSet{3, 4, 7, 22}.to_string() == "3,4,7,22");
  CHECK(VertexSet::parse("").empty());
}

TEST_CASE("greedy set is independent") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto g = random_graph(30, 0.2, seed);
    CHECK(is_independent(g, greedy_independent_set(g)));
  }
}

TEST_CASE("exact solver on the 25-vertex instance and small cases") {
  const auto r = exact_mis(test::appendix_b());
  CHECK(r.optimal());
  CHECK(r.alpha == 4);
  CHECK(is_independent(test::appendix_b(), r.witness));
  CHECK(exact_mis(complete(5)).alpha == 1);
  CHECK(exact_mis(Graph(5, {})).alpha == 5);
}

TEST_CASE("exact solver agrees with enumeration") {
  for (int n : {8, 12, 16}) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const auto g = random_graph(n, 0.3, 1000 * n + seed);
      const auto r = exact_mis(g);
      REQUIRE(r.optimal());
      CHECK(r.alpha == test::brute_force_alpha(g));
      CHECK(static_cast<int>(r.witness.size()) == r.alpha);
      CHECK(is_independent(g, r.witness));
    }
  }
}

TEST_CASE("exact solver beyond one word") {
  const auto g = random_graph(90, 0.5, 3);
  const auto r = exact_mis(g);
  REQUIRE(r.optimal());
  CHECK(is_independent(g, r.witness));
  CHECK(r.alpha >= static_cast<int>(greedy_independent_set(g).size()));
}

TEST_CASE("exhausted budget reports unknown") {
  const auto r = exact_mis(random_graph(60, 0.1, 5), 10);
  CHECK_FALSE(r.optimal());
  CHECK(static_cast<int>(r.witness.size()) == r.alpha);
}

TEST_CASE("digest is stable under edge order") {
  const Graph a(4, {{1, 2}, {3, 4}});
  const Graph b(4, {{4, 3}, {2, 1}});
  CHECK(graph_digest(a) == graph_digest(b));
  CHECK(graph_digest(a).size() == 16);
}

TEST_CASE("kv files") {
  const auto kv = KvFile::parse("# c\nparam N := 25;\nk = 4\nflag = yes\n");
  CHECK(kv.integer("N") == 25);
  CHECK(kv.number("k") == 4.0);
  CHECK(kv.flag("flag", false));
  CHECK(kv.number("missing", 1.5) == 1.5);
  try {
    KvFile::parse("a = 1\nb = x\n").number("b");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  for (double v : {0.1, 1e10, -0.000082507074949, 100000000.000082492828369})
    CHECK(std::stod(format_double(v)) == v);
}

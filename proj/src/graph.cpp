#include "mis/graph.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "mis/errors.hpp"
#include "mis/rng.hpp"

namespace mis {

// ---------------------------------------------------------------------------
// VertexSet

VertexSet::VertexSet(std::initializer_list<VertexId> ids) : VertexSet(std::vector<VertexId>(ids)) {}

VertexSet::VertexSet(std::vector<VertexId> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

bool VertexSet::contains(VertexId v) const { return std::binary_search(ids_.begin(), ids_.end(), v); }

void VertexSet::insert(VertexId v) {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), v);
  if (it == ids_.end() || *it != v) ids_.insert(it, v);
}

void VertexSet::erase(VertexId v) {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), v);
  if (it != ids_.end() && *it == v) ids_.erase(it);
}

std::string VertexSet::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(ids_[i]);
  }
  return out;
}

VertexSet VertexSet::parse(std::string_view text) {
  std::vector<VertexId> ids;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && (std::isspace(static_cast<unsigned char>(text[pos])) || text[pos] == ','))
      ++pos;
    if (pos >= text.size()) break;
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), value);
    if (ec != std::errc()) throw ParseError(0, "bad vertex list near '" + std::string(text.substr(pos)) + "'");
    ids.push_back(value);
    pos = static_cast<std::size_t>(ptr - text.data());
  }
  return VertexSet(std::move(ids));
}

// ---------------------------------------------------------------------------
// Graph

Graph::Graph(int n, std::vector<Edge> edges) : n_(n) {
  if (n < 0) throw PreconditionError("vertex count must be non-negative");
  for (auto& e : edges) {
    if (e.u == e.v) throw PreconditionError("self-loop at vertex " + std::to_string(e.u));
    if (e.u < 1 || e.v < 1 || e.u > n || e.v > n)
      throw PreconditionError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                              ") outside 1.." + std::to_string(n));
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end());
  const auto before = edges.size();
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  duplicates_ = before - edges.size();
  edges_ = std::move(edges);

  words_ = (static_cast<std::size_t>(n_) + 63) / 64;
  adjacency_.assign(words_ * static_cast<std::size_t>(n_), 0);
  for (const auto& e : edges_) {
    const int a = e.u - 1, b = e.v - 1;
    adjacency_[a * words_ + b / 64] |= 1ULL << (b % 64);
    adjacency_[b * words_ + a / 64] |= 1ULL << (a % 64);
  }
}

bool Graph::adjacent(VertexId a, VertexId b) const {
  if (a < 1 || b < 1 || a > n_ || b > n_) return false;
  const int i = a - 1, j = b - 1;
  return (adjacency_[i * words_ + j / 64] >> (j % 64)) & 1ULL;
}

int Graph::degree(VertexId v) const {
  int d = 0;
  for (auto word : row(v - 1)) d += std::popcount(word);
  return d;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        if (c == '\n') ++line_;
        ++pos_;
      } else {
        break;
      }
    }
  }
  bool done() {
    skip_space();
    return pos_ >= text_.size();
  }
  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool accept(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view token, const char* context) {
    if (!accept(token))
      throw ParseError(line_, std::string("expected '") + std::string(token) + "' " + context);
  }
  // Advances to (not past) the next `stop` character.
  void skip_past_before(char stop) {
    while (pos_ < text_.size() && text_[pos_] != stop) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }
  std::string word() {
    skip_space();
    const auto start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }
  long long integer(const char* context) {
    skip_space();
    long long value = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
    if (ec != std::errc()) throw ParseError(line_, std::string("expected integer ") + context);
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return value;
  }
  int line() const { return line_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

std::string dropped_warning(std::size_t dropped) {
  return std::to_string(dropped) + " duplicate edge(s) dropped during normalization";
}

}  // namespace

ParsedGraph parse_edge_list(std::string_view text) {
  Cursor cur(text);
  long long n = -1;

  // Declarations: "n = 25;" or "param N := 25;" (other params are ignored).
  while (!cur.done() && cur.peek() != '(') {
    const int line = cur.line();
    const std::string head = cur.word();
    if (head == "n" || head == "N") {
      if (!cur.accept(":=")) cur.expect("=", "after vertex count name");
      n = cur.integer("for vertex count");
      cur.expect(";", "after vertex count");
    } else if (head == "param") {
      const std::string name = cur.word();
      if (!cur.accept(":=")) cur.expect("=", "in param declaration");
      if (name == "N" || name == "n") {
        n = cur.integer("for vertex count");
      } else {
        cur.skip_past_before(';');
      }
      cur.expect(";", "after param declaration");
    } else if (head == "set") {
      cur.word();
      cur.expect(":=", "after set name");
      break;
    } else {
      throw ParseError(line, head.empty() ? "unexpected character" : "unexpected token '" + head + "'");
    }
  }
  if (n < 0) throw ParseError(cur.line(), "missing vertex-count declaration (e.g. \"n=25;\")");
  if (n > 1'000'000) throw ParseError(cur.line(), "vertex count too large");

  std::vector<Edge> edges;
  bool terminated = false;
  while (!cur.done()) {
    if (cur.accept(";")) {
      terminated = true;
      break;
    }
    const int line = cur.line();
    if (!cur.accept("(")) throw ParseError(line, "malformed pair: expected '('");
    const auto i = cur.integer("as first endpoint");
    cur.expect(",", "between pair endpoints");
    const auto j = cur.integer("as second endpoint");
    cur.expect(")", "to close pair");
    if (i < 1 || j < 1 || i > n || j > n)
      throw ParseError(line, "vertex index out of range in (" + std::to_string(i) + ", " + std::to_string(j) +
                                 "), n = " + std::to_string(n));
    if (i == j) throw ParseError(line, "self-loop (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    edges.push_back({static_cast<int>(i), static_cast<int>(j)});
  }
  if (!edges.empty() && !terminated) throw ParseError(cur.line(), "edge list not terminated by ';'");
  if (!cur.done()) throw ParseError(cur.line(), "trailing text after ';'");

  ParsedGraph out{Graph(static_cast<int>(n), std::move(edges)), {}};
  if (out.graph.duplicates_dropped() > 0) out.warnings.push_back(dropped_warning(out.graph.duplicates_dropped()));
  return out;
}

ParsedGraph parse_dimacs(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  long long n = -1, declared_m = -1;
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag == "c") continue;
    if (tag == "p") {
      std::string kind;
      if (n >= 0) throw ParseError(line_no, "duplicate problem line");
      if (!(ls >> kind >> n >> declared_m) || n < 0 || declared_m < 0)
        throw ParseError(line_no, "malformed problem line, expected \"p edge N M\"");
      if (kind != "edge" && kind != "col" && kind != "edges")
        throw ParseError(line_no, "unsupported problem kind '" + kind + "'");
    } else if (tag == "e") {
      if (n < 0) throw ParseError(line_no, "edge before \"p edge N M\" header");
      long long i = 0, j = 0;
      if (!(ls >> i >> j)) throw ParseError(line_no, "malformed edge line");
      if (i < 1 || j < 1 || i > n || j > n)
        throw ParseError(line_no, "vertex index out of range in e " + std::to_string(i) + " " + std::to_string(j));
      if (i == j) throw ParseError(line_no, "self-loop e " + std::to_string(i) + " " + std::to_string(j));
      edges.push_back({static_cast<int>(i), static_cast<int>(j)});
    } else {
      throw ParseError(line_no, "unknown line tag '" + tag + "'");
    }
  }
  if (n < 0) throw ParseError(0, "missing \"p edge N M\" header");

  ParsedGraph out{Graph(static_cast<int>(n), std::move(edges)), {}};
  if (out.graph.duplicates_dropped() > 0) out.warnings.push_back(dropped_warning(out.graph.duplicates_dropped()));
  if (static_cast<long long>(out.graph.edge_count()) != declared_m)
    out.warnings.push_back("header declares " + std::to_string(declared_m) + " edges, " +
                           std::to_string(out.graph.edge_count()) + " kept");
  return out;
}

ParsedGraph parse_graph(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (text[pos] == '#') {
      while (pos < text.size() && text[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(text[pos]))) {
      ++pos;
    } else {
      break;
    }
  }
  const bool dimacs = pos < text.size() && (text[pos] == 'p' || text[pos] == 'c' || text[pos] == 'e') &&
                      (pos + 1 >= text.size() || std::isspace(static_cast<unsigned char>(text[pos + 1])));
  return dimacs ? parse_dimacs(text) : parse_edge_list(text);
}

ParsedGraph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open graph file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_graph(buf.str());
}

std::string emit_dimacs(const Graph& g) {
  std::string out = "p edge " + std::to_string(g.n()) + " " + std::to_string(g.edge_count()) + "\n";
  for (const auto& e : g.edges()) out += "e " + std::to_string(e.u) + " " + std::to_string(e.v) + "\n";
  return out;
}

// ---------------------------------------------------------------------------

Graph random_graph(int n, double p, std::uint64_t seed) {
  if (n < 1) throw PreconditionError("random_graph needs n >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw PreconditionError("edge probability must lie in [0, 1]");
  SplitMix64 rng(seed);
  std::vector<Edge> edges;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      if (rng.uniform() < p) edges.push_back({i, j});
  return Graph(n, std::move(edges));
}

bool is_independent(const Graph& g, const VertexSet& s) {
  for (auto v : s)
    if (v < 1 || v > g.n())
      throw PreconditionError("vertex " + std::to_string(v) + " outside 1.." + std::to_string(g.n()));
  const auto& ids = s.ids();
  for (std::size_t a = 0; a < ids.size(); ++a)
    for (std::size_t b = a + 1; b < ids.size(); ++b)
      if (g.adjacent(ids[a], ids[b])) return false;
  return true;
}

VertexSet greedy_independent_set(const Graph& g) {
  const int n = g.n();
  std::vector<bool> alive(n, true);
  std::vector<int> deg(n);
  for (int v = 0; v < n; ++v) deg[v] = g.degree(v + 1);
  VertexSet chosen;
  for (;;) {
    int best = -1;
    for (int v = 0; v < n; ++v)
      if (alive[v] && (best < 0 || deg[v] < deg[best])) best = v;
    if (best < 0) break;
    chosen.insert(best + 1);
    std::vector<int> removed{best};
    for (int u = 0; u < n; ++u)
      if (alive[u] && g.adjacent(best + 1, u + 1)) removed.push_back(u);
    for (int r : removed) alive[r] = false;
    for (int r : removed)
      for (int u = 0; u < n; ++u)
        if (alive[u] && g.adjacent(r + 1, u + 1)) --deg[u];
  }
  return chosen;
}

std::string graph_digest(const Graph& g) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : emit_dimacs(g)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace mis

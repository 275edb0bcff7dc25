#include <cmath>
#include <future>

#include "mis/errors.hpp"
#include "mis/paramfit.hpp"

namespace mis::fit {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

struct ChunkResult {
  std::vector<LegacyCandidate> accepted;
  std::size_t domain_skipped = 0;
};

// Decodes linear index -> one parameter tuple, y varying fastest (the order
// of the original nested loops: p, t, M, r, s, w, y).
cost::LegacyParams decode(const LegacyGrid& g, std::size_t index) {
  cost::LegacyParams out;
  const std::vector<double>* axes[] = {&g.y, &g.w, &g.s, &g.r, &g.M, &g.t, &g.p};
  double* slots[] = {&out.y, &out.w, &out.s, &out.r, &out.M, &out.t, &out.p};
  for (int a = 0; a < 7; ++a) {
    const auto& axis = *axes[a];
    *slots[a] = axis[index % axis.size()];
    index /= axis.size();
  }
  return out;
}

ChunkResult scan(const LegacyGrid& g, std::size_t begin, std::size_t end) {
  ChunkResult out;
  for (std::size_t i = begin; i < end; ++i) {
    const auto params = decode(g, i);
    try {
      auto checks = legacy_requirements(params, g.N, g.k);
      bool all = true;
      for (const auto& c : checks) all = all && c.pass;
      if (!all) continue;
      const double lo = params.w > 0 ? params.w : 0.0;
      const auto measure = cost::convexity_measure(params, lo, 1.0, g.convexity_subintervals);
      out.accepted.push_back({params, measure, std::move(checks)});
    } catch (const DomainError&) {
      ++out.domain_skipped;
    }
  }
  return out;
}

}  // namespace

std::vector<LegacyCheck> legacy_requirements(const cost::LegacyParams& params, int N, int k) {
  const cost::CostParams cp = params;
  auto f = [&](long double x) { return cost::eval_ld(cp, x); };
  const long double f0 = f(0), f1 = f(1);
  std::vector<LegacyCheck> out;
  auto add = [&](std::string name, long double margin, bool strict) {
    out.push_back({std::move(name), strict ? margin > 0 : margin >= 0, static_cast<double>(margin)});
  };

  // Equal splits: f(1) + (m-1) f(0) <= m f(1/m), the large ones only when
  // there are enough bins.
  struct Split {
    int m;
    int min_bins;
  };
  for (const Split sp : {Split{20, 20}, Split{10, 10}, Split{5, 0}, Split{4, 0}, Split{3, 0}, Split{1000, 1000}}) {
    if (N < sp.min_bins) continue;
    add("split_" + std::to_string(sp.m), sp.m * f(1.0L / sp.m) - f1 - (sp.m - 1) * f0, false);
  }
  // Two pieces: f(0) + f(1) <= f(a) + f(1 - a).
  for (double a : {0.5, 0.001, 0.02, 0.05, 0.15, 0.3})
    add("two_piece_" + fmt(a), f(a) + f(1.0L - a) - f0 - f1, false);
  // Empty bins: k f(1) + (N-k) f(0) < 2k f(1/2) + (N-2k) f(0).
  add("empty_bins", 2.0L * k * f(0.5L) + (N - 2.0L * k) * f0 - k * f1 - (N - k) * f0, true);
  return out;
}

std::vector<double> geometric_grid(double start, double ratio, int count) {
  std::vector<double> out;
  double v = start;
  for (int i = 0; i < count; ++i, v *= ratio) out.push_back(v);
  return out;
}

LegacySearchResult grid_search_legacy(const LegacyGrid& g) {
  LegacySearchResult result;
  std::size_t total = 1;
  for (const auto* axis : {&g.p, &g.t, &g.M, &g.r, &g.s, &g.w, &g.y}) {
    if (axis->empty()) return result;
    total *= axis->size();
  }
  if (total > g.budget) {
    total = g.budget;
    result.budget_exhausted = true;
  }
  result.evaluated = total;

  const std::size_t jobs = std::max<std::size_t>(1, std::min<std::size_t>(g.jobs, total));
  std::vector<std::future<ChunkResult>> parts;
  for (std::size_t j = 0; j < jobs; ++j) {
    const std::size_t begin = total * j / jobs, end = total * (j + 1) / jobs;
    parts.push_back(std::async(jobs == 1 ? std::launch::deferred : std::launch::async,
                               [&g, begin, end] { return scan(g, begin, end); }));
  }
  for (auto& part : parts) {
    auto chunk = part.get();
    result.domain_skipped += chunk.domain_skipped;
    for (auto& c : chunk.accepted) result.accepted.push_back(std::move(c));
  }
  return result;
}

}  // namespace mis::fit

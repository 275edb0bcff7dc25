#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "mis/graph.hpp"
#include "mis/minimizer.hpp"
#include "mis/paramfit.hpp"

namespace mis::driver {

/// One structured line per Step-B run.
struct TraceEntry {
  int k = 0;
  double w = 0;
  std::string status;
  int iterations = 0;
  double seconds = 0;
  /// "k=4 w=0.015 status=integer-found iterations=31 seconds=0.12"
  std::string line() const;
};

/// Fitted parameter sets keyed by the full fit configuration, so instances
/// sharing N and k reuse one Step A. Thread-safe.
class ParamCache {
 public:
  /// Cached report for cfg, fitting on first use.
  fit::FitReport get(const fit::FitConfig& cfg);
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, fit::FitReport> reports_;
};

enum class StopMode { first_hit, collect_all };

struct SweepConfig {
  double w_lo = 0.01, w_hi = 0.01, w_step = 1e-3;
  minimizer::MinimizeOptions opts;
  StopMode stop_mode = StopMode::collect_all;
  double band = 0;
  VertexSet partial;
  unsigned jobs = 1;

  /// Throws PreconditionError unless 0 <= w_lo <= w_hi < 1 and w_step > 0.
  void validate() const;
  /// w_lo, w_lo + step, ... up to w_hi (inclusive within 1e-9 steps).
  std::vector<double> points() const;
};

struct SweepPoint {
  double w = 0;
  /// Empty when the run produced an outcome; otherwise why it did not
  /// ("fit infeasible", a domain error, ...).
  std::string failure;
  minimizer::SolveOutcome outcome;
  TraceEntry trace;

  bool hit() const { return failure.empty() && outcome.status == minimizer::OutcomeStatus::integer_found; }
};

/// Step B at each w in ascending order. With refit, Step A runs at every w
/// (cfg_template.with_w); otherwise the parameters of one fit, or `transfer`
/// when given, are reused with the floor moved to each w. Runs execute up to
/// sweep.jobs at a time; results are merged in w order, and first-hit mode
/// drops everything after the first integer-found point.
std::vector<SweepPoint> sweep_w(const Graph& g, int k, const fit::FitConfig& cfg_template, const SweepConfig& sweep,
                                bool refit, const std::optional<cost::CostParams>& transfer = std::nullopt,
                                ParamCache* cache = nullptr);

enum class SearchMode { upward, binary };

struct SearchOptions {
  SearchMode mode = SearchMode::upward;
  /// Largest k tried; negative means N.
  int k_hi = -1;
  /// Retry ladder per k: every (multiplier of the template w, seed) pair is
  /// tried in order until one run is integer-found.
  std::vector<double> w_multipliers{1.0};
  std::vector<std::uint64_t> seeds{1};
  minimizer::MinimizeOptions opts;
  double band = 0;
};

struct SearchOutcome {
  int best_k = 0;
  VertexSet witness;
  std::vector<int> unconfirmed;  // k values whose whole retry ladder failed
  std::vector<TraceEntry> trace;
};

/// Largest k confirmed by an independent witness. Upward mode starts at the
/// greedy set and stops at the first unconfirmed k; binary mode keeps
/// [bottom, top] and moves bottom up on a hit, top down otherwise. A failure
/// never counts as proof that k is infeasible.
SearchOutcome search_k(const Graph& g, const fit::FitConfig& cfg_template, const SearchOptions& opts = {},
                       ParamCache* cache = nullptr);

struct TwoStepResult {
  bool fit_ok = false;
  fit::FitReport fit;
  minimizer::SolveOutcome outcome;
  /// "infeasible-fit" when Step A failed, otherwise the Step B status.
  std::string status() const;
};

/// Step A (or `transfer`) then Step B with the partial solution fixed at 1.
/// Throws PreconditionError if `partial` is not independent in g.
TwoStepResult run_two_step(const Graph& g, const fit::FitConfig& cfg, int k, const VertexSet& partial = {},
                           const minimizer::MinimizeOptions& opts = {}, double band = 0,
                           const std::optional<cost::CostParams>& transfer = std::nullopt);

}  // namespace mis::driver

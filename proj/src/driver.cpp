#include "mis/driver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>

#include "mis/errors.hpp"

namespace mis::driver {
namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

fit::FitConfig for_instance(const fit::FitConfig& tmpl, const Graph& g, int k) {
  fit::FitConfig cfg = tmpl;
  cfg.N = g.n();
  return cfg.with_k(k);
}

fit::FitReport fit_with(const fit::FitConfig& cfg, ParamCache* cache) {
  return cache ? cache->get(cfg) : fit::fit_parameters(cfg);
}

// One Step-B run with failures folded into the point instead of thrown.
SweepPoint run_point(const Graph& g, int k, double w, const cost::CostParams& params, const SweepConfig& sweep) {
  SweepPoint p;
  p.w = w;
  const auto t0 = Clock::now();
  try {
    minimizer::PolytopeSpec spec(g, k, w, sweep.partial, sweep.band);
    p.outcome = minimizer::solve_step_b(spec, cost::with_floor(params, w), sweep.opts);
    p.trace.status = minimizer::to_string(p.outcome.status);
    p.trace.iterations = p.outcome.assignment.iterations;
  } catch (const DomainError& e) {
    p.failure = e.what();
    p.trace.status = "domain-error";
  }
  p.trace.k = k;
  p.trace.w = w;
  p.trace.seconds = since(t0);
  return p;
}

SweepPoint fit_failure(int k, double w, const std::string& why) {
  SweepPoint p;
  p.w = w;
  p.failure = why;
  p.trace = {k, w, "infeasible-fit", 0, 0.0};
  return p;
}

}  // namespace

std::string TraceEntry::line() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "k=%d w=%.10g status=%s iterations=%d seconds=%.3f", k, w, status.c_str(),
                iterations, seconds);
  return buf;
}

fit::FitReport ParamCache::get(const fit::FitConfig& cfg) {
  const std::string key = cfg.to_kv();
  {
    std::lock_guard lock(mu_);
    if (auto it = reports_.find(key); it != reports_.end()) return it->second;
  }
  auto report = fit::fit_parameters(cfg);
  std::lock_guard lock(mu_);
  return reports_.emplace(key, std::move(report)).first->second;
}

std::size_t ParamCache::size() const {
  std::lock_guard lock(mu_);
  return reports_.size();
}

void SweepConfig::validate() const {
  if (!(w_lo >= 0 && w_lo <= w_hi && w_hi < 1)) throw PreconditionError("w range must satisfy 0 <= lo <= hi < 1");
  if (!(w_step > 0)) throw PreconditionError("w step must be positive");
}

std::vector<double> SweepConfig::points() const {
  validate();
  const auto count = static_cast<long long>(std::floor((w_hi - w_lo) / w_step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (long long i = 0; i < count; ++i) out.push_back(w_lo + static_cast<double>(i) * w_step);
  return out;
}

std::vector<SweepPoint> sweep_w(const Graph& g, int k, const fit::FitConfig& cfg_template, const SweepConfig& sweep,
                                bool refit, const std::optional<cost::CostParams>& transfer, ParamCache* cache) {
  const auto ws = sweep.points();
  if (!is_independent(g, sweep.partial))
    throw PreconditionError("partial solution {" + sweep.partial.to_string() + "} is not independent");
  const auto base_cfg = for_instance(cfg_template, g, k);

  std::optional<cost::CostParams> shared = transfer;
  std::string shared_failure;
  if (!refit && !shared) {
    auto report = fit_with(base_cfg, cache);
    if (report.ok())
      shared = report.params;
    else
      shared_failure = std::string("fit ") + lp::to_string(report.lp_status);
  }

  auto job = [&](double w) -> SweepPoint {
    if (!refit) {
      if (!shared) return fit_failure(k, w, shared_failure);
      return run_point(g, k, w, *shared, sweep);
    }
    fit::FitConfig cfg;
    try {
      cfg = base_cfg.with_w(w);
    } catch (const PreconditionError& e) {
      return fit_failure(k, w, e.what());
    }
    auto report = fit_with(cfg, cache);
    if (!report.ok()) return fit_failure(k, w, std::string("fit ") + lp::to_string(report.lp_status));
    return run_point(g, k, w, *report.params, sweep);
  };

  std::vector<SweepPoint> out;
  const std::size_t width = std::max(1u, sweep.jobs);
  for (std::size_t begin = 0; begin < ws.size(); begin += width) {
    const std::size_t end = std::min(ws.size(), begin + width);
    std::vector<std::future<SweepPoint>> batch;
    for (std::size_t i = begin; i < end; ++i)
      batch.push_back(std::async(width == 1 ? std::launch::deferred : std::launch::async, job, ws[i]));
    for (auto& f : batch) out.push_back(f.get());
    if (sweep.stop_mode == StopMode::first_hit) {
      for (std::size_t i = begin; i < out.size(); ++i) {
        if (out[i].hit()) {
          out.resize(i + 1);
          return out;
        }
      }
    }
  }
  return out;
}

SearchOutcome search_k(const Graph& g, const fit::FitConfig& cfg_template, const SearchOptions& opts,
                       ParamCache* cache) {
  SearchOutcome out;
  out.witness = greedy_independent_set(g);
  out.best_k = static_cast<int>(out.witness.size());
  const int k_hi = opts.k_hi < 0 ? g.n() : std::min(opts.k_hi, g.n());

  // Walks the retry ladder for one k; returns a verified witness on success.
  auto attempt = [&](int k) -> std::optional<VertexSet> {
    const auto cfg_k = for_instance(cfg_template, g, k);
    for (double mult : opts.w_multipliers) {
      const double w = cfg_template.w() * mult;
      fit::FitConfig cfg;
      try {
        cfg = cfg_k.with_w(w);
      } catch (const PreconditionError&) {
        out.trace.push_back({k, w, "invalid-w", 0, 0.0});
        continue;
      }
      const auto t0 = Clock::now();
      auto report = fit_with(cfg, cache);
      if (!report.ok()) {
        out.trace.push_back({k, w, "infeasible-fit", 0, since(t0)});
        continue;
      }
      for (auto seed : opts.seeds) {
        SweepConfig single;
        single.opts = opts.opts;
        single.opts.seed = seed;
        single.band = opts.band;
        auto p = run_point(g, k, cfg.w(), *report.params, single);
        out.trace.push_back(p.trace);
        if (p.hit() && p.outcome.recognized && is_independent(g, *p.outcome.recognized) &&
            static_cast<int>(p.outcome.recognized->size()) == k)
          return p.outcome.recognized;
      }
    }
    out.unconfirmed.push_back(k);
    return std::nullopt;
  };

  if (opts.mode == SearchMode::upward) {
    for (int k = out.best_k + 1; k <= k_hi; ++k) {
      auto hit = attempt(k);
      if (!hit) break;
      out.best_k = k;
      out.witness = std::move(*hit);
    }
  } else {
    int bottom = out.best_k + 1, top = k_hi;
    while (bottom <= top) {
      const int mid = bottom + (top - bottom) / 2;
      if (auto hit = attempt(mid)) {
        out.best_k = mid;
        out.witness = std::move(*hit);
        bottom = mid + 1;
      } else {
        top = mid - 1;
      }
    }
  }
  return out;
}

std::string TwoStepResult::status() const {
  return fit_ok ? minimizer::to_string(outcome.status) : "infeasible-fit";
}

TwoStepResult run_two_step(const Graph& g, const fit::FitConfig& cfg, int k, const VertexSet& partial,
                           const minimizer::MinimizeOptions& opts, double band,
                           const std::optional<cost::CostParams>& transfer) {
  if (!is_independent(g, partial))
    throw PreconditionError("partial solution {" + partial.to_string() + "} is not independent");
  TwoStepResult out;
  const auto inst = for_instance(cfg, g, k);
  std::optional<cost::CostParams> params = transfer;
  if (!params) {
    out.fit = fit::fit_parameters(inst);
    if (!out.fit.ok()) return out;
    params = out.fit.params;
  }
  out.fit_ok = true;
  minimizer::PolytopeSpec spec(g, k, transfer ? cost::floor_size(*transfer) : inst.w(), partial, band);
  out.outcome = minimizer::solve_step_b(spec, *params, opts);
  return out;
}

}  // namespace mis::driver

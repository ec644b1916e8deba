#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <thread>
#include <vector>

#include "masspart/geom.hpp"
#include "masspart/random.hpp"

namespace masspart::search {

struct SolverConfig {
  std::uint64_t seed = 0;
  int starts = 64;
  /// Cap on pattern sweeps plus Levenberg-Marquardt iterations per start.
  int max_iters = 2000;
  /// Success threshold, relative to the largest residual component seen at the starts.
  double target = 1e-6;
  int grid_resolution = 64;
  /// Gaussian mollification scale applied to discrete inputs (0 = off).
  double mollify = 0.0;
  /// Auto-mollify discrete inputs at 1e-3 x data diameter when mollify == 0.
  bool requires_continuity = false;
  /// Starts are run in batches of this size; the search stops after the first
  /// batch that converged. Fixed so results do not depend on the machine.
  int batch = 8;
};

/// A parametrized search space: `retract` maps a state and a local coordinate
/// step of length dof to a new state.
template <class State>
struct Space {
  int dof = 0;
  std::function<State(CounterRng&)> sample;
  std::function<State(const State&, const Vec&)> retract;
};

template <class State>
using ResidualFn = std::function<Vec(const State&)>;

template <class State>
struct Outcome {
  State best{};
  Vec residual;
  double residual_norm = std::numeric_limits<double>::infinity();
  /// Largest |residual component| over the start states.
  double scale = 0.0;
  double effective_target = 0.0;
  int best_start = -1;
  int starts_run = 0;
  long evaluations = 0;
  bool converged = false;
};

/// Runs fn(i) for i in [0, n) on a bounded pool of threads.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
  const int workers = std::clamp(static_cast<int>(std::thread::hardware_concurrency()), 1, std::max(1, n));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += workers) fn(i);
    });
  }
}

namespace detail {

template <class State>
struct Evaluated {
  State x;
  Vec r;
  double norm = std::numeric_limits<double>::infinity();
};

template <class State>
Evaluated<State> evaluate(const ResidualFn<State>& f, State x, long& evals) {
  ++evals;
  Evaluated<State> e{std::move(x), Vec(), std::numeric_limits<double>::infinity()};
  try {
    e.r = f(e.x);
    const double n = e.r.norm();
    if (std::isfinite(n)) e.norm = n;
  } catch (const Error&) {
    // Infeasible point (empty measure, degenerate direction): treat as +inf.
  }
  return e;
}

template <class State>
void pattern_search(const Space<State>& space, const ResidualFn<State>& f, Evaluated<State>& cur, double stop,
                    double& step, double min_step, int& sweeps_left, long& evals) {
  Vec delta = Vec::Zero(space.dof);
  while (sweeps_left > 0 && step > min_step && cur.norm > stop) {
    --sweeps_left;
    bool improved = false;
    for (int j = 0; j < space.dof && cur.norm > stop; ++j) {
      for (double sgn : {1.0, -1.0}) {
        delta.setZero();
        delta(j) = sgn * step;
        auto cand = evaluate(f, space.retract(cur.x, delta), evals);
        if (cand.norm < cur.norm) {
          cur = std::move(cand);
          improved = true;
          break;
        }
      }
    }
    step = improved ? std::min(2.0 * step, 0.5) : 0.5 * step;
  }
}

template <class State>
void levenberg_marquardt(const Space<State>& space, const ResidualFn<State>& f, Evaluated<State>& cur, double stop,
                         int& iters_left, long& evals) {
  if (space.dof == 0 || !std::isfinite(cur.norm)) return;
  const double h = 1e-6;
  double mu = 1e-3;
  while (iters_left > 0 && cur.norm > stop) {
    --iters_left;
    const auto m = cur.r.size();
    Mat jac(m, space.dof);
    bool ok = true;
    for (int j = 0; j < space.dof && ok; ++j) {
      Vec step = Vec::Zero(space.dof);
      step(j) = h;
      auto fp = evaluate(f, space.retract(cur.x, step), evals);
      step(j) = -h;
      auto fm = evaluate(f, space.retract(cur.x, step), evals);
      if (!std::isfinite(fp.norm) || !std::isfinite(fm.norm)) {
        ok = false;
        break;
      }
      jac.col(j) = (fp.r - fm.r) / (2.0 * h);
    }
    if (!ok) return;
    const Mat a = jac.transpose() * jac;
    const Vec g = jac.transpose() * cur.r;
    bool accepted = false;
    for (int attempt = 0; attempt < 12; ++attempt) {
      Mat damped = a;
      damped.diagonal().array() += mu * (a.diagonal().array() + 1e-12);
      const Vec delta = -damped.ldlt().solve(g);
      if (!delta.allFinite()) {
        mu *= 10.0;
        continue;
      }
      auto cand = evaluate(f, space.retract(cur.x, delta), evals);
      if (cand.norm < cur.norm) {
        cur = std::move(cand);
        mu = std::max(mu / 5.0, 1e-12);
        accepted = true;
        break;
      }
      mu *= 8.0;
    }
    if (!accepted) return;
  }
}

}  // namespace detail

/// Multi-start zero search for a residual map: pattern search (coordinate
/// moves with step halving) alternated with a finite-difference
/// Levenberg-Marquardt polish. Deterministic for a fixed seed.
template <class State>
Outcome<State> find_zero(const Space<State>& space, const ResidualFn<State>& f, const SolverConfig& cfg,
                         std::vector<State> extra_starts = {}) {
  const int n_random = std::max(0, cfg.starts);
  const int n_total = n_random + static_cast<int>(extra_starts.size());
  if (n_total == 0) throw Error(ErrorCode::InvalidArgument, "no starts requested");

  std::vector<detail::Evaluated<State>> starts(static_cast<std::size_t>(n_total));
  std::vector<long> start_evals(static_cast<std::size_t>(n_total), 0);
  parallel_for(n_total, [&](int i) {
    auto& evals = start_evals[static_cast<std::size_t>(i)];
    if (i < static_cast<int>(extra_starts.size())) {
      starts[static_cast<std::size_t>(i)] = detail::evaluate(f, extra_starts[static_cast<std::size_t>(i)], evals);
      return;
    }
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(i));
    detail::Evaluated<State> e;
    for (int attempt = 0; attempt < 16 && !std::isfinite(e.norm); ++attempt) {
      e = detail::evaluate(f, space.sample(rng), evals);
    }
    starts[static_cast<std::size_t>(i)] = std::move(e);
  });

  Outcome<State> out;
  for (const auto& s : starts) {
    if (std::isfinite(s.norm) && s.r.size() > 0) out.scale = std::max(out.scale, s.r.cwiseAbs().maxCoeff());
  }
  out.effective_target = cfg.target * (out.scale > 0.0 ? out.scale : 1.0);
  const double polish_to = out.effective_target * 1e-4;

  std::vector<detail::Evaluated<State>> results(starts.size());
  const int batch = std::max(1, cfg.batch);
  for (int first = 0; first < n_total; first += batch) {
    const int count = std::min(batch, n_total - first);
    parallel_for(count, [&](int b) {
      const auto i = static_cast<std::size_t>(first + b);
      auto cur = starts[i];
      long& evals = start_evals[i];
      if (!std::isfinite(cur.norm)) {
        results[i] = std::move(cur);
        return;
      }
      int budget = std::max(1, cfg.max_iters);
      double step = 0.25;
      for (int round = 0; round < 4 && budget > 0 && cur.norm > polish_to; ++round) {
        detail::pattern_search(space, f, cur, polish_to, step, round == 0 ? 1e-3 : 1e-11, budget, evals);
        int lm_iters = std::min(budget, 40);
        const int before = lm_iters;
        detail::levenberg_marquardt(space, f, cur, polish_to, lm_iters, evals);
        budget -= before - lm_iters;
        step = std::max(step, 1e-4);
      }
      results[i] = std::move(cur);
    });
    out.starts_run = first + count;
    for (int i = first; i < first + count; ++i) {
      const auto& r = results[static_cast<std::size_t>(i)];
      if (r.norm < out.residual_norm) {
        out.residual_norm = r.norm;
        out.residual = r.r;
        out.best = r.x;
        out.best_start = i;
      }
    }
    if (out.residual_norm <= out.effective_target) break;
  }
  for (long e : start_evals) out.evaluations += e;
  out.converged = out.residual_norm <= out.effective_target;
  return out;
}

}  // namespace masspart::search

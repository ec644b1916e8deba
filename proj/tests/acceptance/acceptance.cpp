// Acceptance suite: one line per criterion, exit status 1 if any line fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "masspart/harness.hpp"
#include "masspart/random.hpp"
#include "masspart/stiefel.hpp"

using namespace masspart;
using harness::Instance;
using harness::Kind;
using masses::FlatMeasure;
using masses::MassAssignment;
using search::SolverConfig;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

char buf[512];

template <class... Args>
std::string fmt(const char* f, Args... args) {
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

MassAssignment cloud(CounterRng& rng, int dim, int d, int n, double shift, double sigma) {
  Mat pts(d, n);
  for (int j = 0; j < n; ++j) pts.col(j) = rng.normal_vector(d) + Vec::Constant(d, shift);
  const auto a = MassAssignment::projected_cloud(dim, pts, Vec::Ones(n));
  return sigma > 0.0 ? masses::mollify(a, sigma) : a;
}

std::vector<int> shuffled(CounterRng& rng, std::vector<int> v) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[static_cast<std::size_t>(rng.next() % i)]);
  return v;
}

flagsolve::FairyProblem fairy_problem(CounterRng& rng, int d, int k, std::vector<int> perm, double sigma) {
  flagsolve::FairyProblem p;
  p.d = d;
  p.k = k;
  p.pi = std::move(perm);
  for (int i = d - 1; i >= k - 1; --i) {
    flagsolve::FairyLevel lvl{cloud(rng, i + 1, d, 7, 0.0, sigma), {}};
    for (int j = 0; j < p.pi_of(i); ++j) lvl.functionals.push_back(cloud(rng, i + 1, d, 6, 0.5 * (j + 1), sigma));
    p.levels.push_back(std::move(lvl));
  }
  return p;
}

Instance fairy_instance(const flagsolve::FairyProblem& p, std::uint64_t seed) {
  Instance inst;
  inst.kind = Kind::Fairy;
  inst.d = p.d;
  inst.k = p.k;
  inst.pi = p.pi;
  inst.levels = p.levels;
  inst.allow_surplus = p.allow_surplus;
  inst.config.seed = seed;
  return inst;
}

std::vector<int> sign_vector(int mask, int n) {
  std::vector<int> s(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) s[static_cast<std::size_t>(c)] = (mask >> c) & 1 ? -1 : 1;
  return s;
}

double gap(const FlatMeasure& m, const Vec& u, double c) { return m.mass_above(u, c) - m.mass_below(u, c); }

double gap(const MassAssignment& a, const geom::HalfFlat& h) {
  const auto m = masses::assign(a, h.carrier);
  return masses::halfspace_mass(m, h) - masses::halfspace_mass(m, h.opposite());
}

// ---------------------------------------------------------------------------

Outcome equivariance() {
  Outcome out;
  double worst_f = 0.0, worst_t = 0.0;
  int fairy = 0, trans = 0;
  for (int i = 0; fairy < 100; ++i) {
    CounterRng rng(1000 + static_cast<std::uint64_t>(i), 0);
    const int d = 2 + i % 3;
    const int k = 1 + (i / 3) % d;
    std::vector<int> base;
    for (int j = d - 1; j >= k - 1; --j) base.push_back(j);
    const auto p = fairy_problem(rng, d, k, shuffled(rng, base), 0.2);
    const int m = p.frame_size();
    const geom::Frame f(random_orthogonal(rng, d).leftCols(m));
    const Vec x0 = flagsolve::evaluate_F_pi(p, f);
    for (int mask = 0; mask < (1 << m); ++mask) {
      const auto s = sign_vector(mask, m);
      const Vec x = flagsolve::evaluate_F_pi(p, f.with_signs(s));
      for (int j = d - 1; j >= k - 1; --j) {
        const int sign = s[static_cast<std::size_t>(p.column_of(j))];
        for (int t = 0; t < j; ++t) {
          worst_f = std::max(worst_f, std::abs(x(p.block_offset(j) + t) - sign * x0(p.block_offset(j) + t)));
        }
      }
    }
    ++fairy;
  }
  for (int i = 0; trans < 100; ++i) {
    CounterRng rng(2000 + static_cast<std::uint64_t>(i), 0);
    const int d = 2 + i % 3;
    const int k = 1 + (i / 3) % d;
    const int lambda = std::max(0, k - 1 - (i / 9) % 2);
    transversal::TransversalProblem p{d, k, lambda, {}};
    for (int j = 0; j < d - k + lambda + 1; ++j) p.assignments.push_back(cloud(rng, k, d, 8, 0.3 * j, 0.1));
    try {
      p.validate();
    } catch (const Error&) {
      continue;
    }
    const int m = p.frame_size();
    const geom::Frame f(random_orthogonal(rng, d).leftCols(m));
    const Vec x0 = transversal::evaluate_transversal_map(p, f);
    for (int mask = 0; mask < (1 << m); ++mask) {
      const auto s = sign_vector(mask, m);
      const Vec x = transversal::evaluate_transversal_map(p, f.with_signs(s));
      for (int b = 1; b <= m; ++b) {
        for (int j = 0; j < d - b; ++j) {
          const int off = p.block_offset(b) + j;
          worst_t = std::max(worst_t, std::abs(x(off) - s[static_cast<std::size_t>(b - 1)] * x0(off)));
        }
      }
    }
    ++trans;
  }
  out.pass = worst_f <= 1e-12 && worst_t <= 1e-12;
  out.detail = fmt("fairy %d instances max dev %.2e, transversal %d instances max dev %.2e (tol 1e-12)", fairy,
                   worst_f, trans, worst_t);
  return out;
}

// Ham-sandwich cut of two measures on a plane: pivot median along u(theta), then
// a sign change of the other gap over theta in [0, pi] refined by bisection.
std::pair<double, double> planar_cut(const FlatMeasure& pivot, const FlatMeasure& other) {
  auto g = [&](double t) {
    const Vec u{{std::cos(t), std::sin(t)}};
    return gap(other, u, masses::median_offset(pivot, u));
  };
  double lo = 0.0, glo = g(0.0);
  double hi = pi;
  for (int i = 1; i <= 720; ++i) {
    const double t = pi * i / 720.0;
    const double gt = g(t);
    if ((gt <= 0.0) != (glo <= 0.0) || gt == 0.0) {
      hi = t;
      break;
    }
    lo = t;
    glo = gt;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((g(mid) <= 0.0) == (glo <= 0.0)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double t = 0.5 * (lo + hi);
  const Vec u{{std::cos(t), std::sin(t)}};
  const double c = masses::median_offset(pivot, u);
  return {std::abs(gap(pivot, u, c)), std::abs(gap(other, u, c))};
}

// Cut of three measures in R^3: offset from the pivot median along u, then a
// zero of the two remaining gaps over the sphere by scan plus Newton.
double spatial_cut(const FlatMeasure& pivot, const FlatMeasure& f1, const FlatMeasure& f2) {
  auto dir = [](const Eigen::Vector2d& x) {
    return Vec{{std::sin(x(0)) * std::cos(x(1)), std::sin(x(0)) * std::sin(x(1)), std::cos(x(0))}};
  };
  auto g = [&](const Eigen::Vector2d& x) {
    const Vec u = dir(x);
    const double c = masses::median_offset(pivot, u);
    return Eigen::Vector2d(gap(f1, u, c), gap(f2, u, c));
  };
  std::vector<std::pair<double, Eigen::Vector2d>> seeds;
  for (int i = 1; i < 40; ++i) {
    for (int j = 0; j < 80; ++j) {
      const Eigen::Vector2d x(pi * i / 40.0, 2.0 * pi * j / 80.0);
      seeds.emplace_back(g(x).norm(), x);
    }
  }
  std::partial_sort(seeds.begin(), seeds.begin() + 12, seeds.end(),
                    [](const auto& a, const auto& b) { return a.first < b.first; });
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < 12 && best > 1e-9; ++s) {
    Eigen::Vector2d x = seeds[static_cast<std::size_t>(s)].second;
    Eigen::Vector2d fx = g(x);
    for (int it = 0; it < 60 && fx.norm() > 1e-13; ++it) {
      Eigen::Matrix2d jac;
      for (int c = 0; c < 2; ++c) {
        Eigen::Vector2d h = Eigen::Vector2d::Zero();
        h(c) = 1e-6;
        jac.col(c) = (g(x + h) - g(x - h)) / 2e-6;
      }
      const Eigen::Vector2d step = jac.colPivHouseholderQr().solve(-fx);
      double t = 1.0;
      while (t > 1e-6 && g(x + t * step).norm() >= fx.norm()) t *= 0.5;
      if (t <= 1e-6) break;
      x += t * step;
      fx = g(x);
    }
    const Vec u = dir(x);
    const double c = masses::median_offset(pivot, u);
    best = std::min(best, std::max({std::abs(gap(pivot, u, c)), std::abs(fx(0)), std::abs(fx(1))}));
  }
  return best;
}

Outcome trivial_permutation() {
  Outcome out;
  double worst_solver = 0.0, worst_cut = 0.0, worst_pos = 0.0;
  int n = 0;
  for (int d : {2, 3}) {
    for (int i = 0; i < 10; ++i, ++n) {
      CounterRng rng(3000 + static_cast<std::uint64_t>(100 * d + i), 0);
      std::vector<int> id;
      for (int j = d - 1; j >= 0; --j) id.push_back(j);
      const auto p = fairy_problem(rng, d, 1, id, 0.2);
      SolverConfig cfg;
      cfg.seed = static_cast<std::uint64_t>(i);
      cfg.starts = 16;
      const auto sol = flagsolve::solve_fairy(p, cfg);
      for (int lvl = d - 1; lvl >= 0; --lvl) {
        const auto& level = p.level(lvl);
        const auto plus = sol.flag.plus_side(lvl);
        worst_solver = std::max(worst_solver, std::abs(gap(level.pivot, plus)));
        for (const auto& f : level.functionals) worst_solver = std::max(worst_solver, std::abs(gap(f, plus)));
        const geom::Flat parent = sol.flag.parent_of(lvl);
        if (parent.dim() == 1) {
          // The cut of a line is the pivot median; its position is unique.
          const auto m = masses::assign(level.pivot, parent);
          const double c = masses::median_offset(m, Vec::Ones(1));
          const double at = parent.coordinates(sol.flag.at_dim(lvl).flat.base())(0);
          worst_pos = std::max(worst_pos, std::abs(c - at));
        } else if (parent.dim() == 2) {
          const auto [a, b] =
              planar_cut(masses::assign(level.pivot, parent), masses::assign(level.functionals.at(0), parent));
          worst_cut = std::max({worst_cut, a, b});
        } else {
          const auto on = [&](const MassAssignment& a) { return masses::assign(a, parent); };
          worst_cut = std::max(worst_cut, spatial_cut(on(level.pivot), on(level.functionals.at(0)),
                                                      on(level.functionals.at(1))));
        }
      }
    }
  }
  out.pass = worst_solver <= 1e-6 && worst_cut <= 1e-6 && worst_pos <= 1e-6;
  out.detail = fmt("%d instances; solver level gap %.2e, independent cut gap %.2e, 1-D cut offset %.2e (tol 1e-6)", n,
                   worst_solver, worst_cut, worst_pos);
  return out;
}

Outcome nontrivial_permutation() {
  Outcome out;
  double worst_res = 0.0, worst_sandwich = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 20; ++i) {
    CounterRng rng(4000 + static_cast<std::uint64_t>(i), 0);
    const auto p = fairy_problem(rng, 3, 1, {1, 2, 0}, 0.2);
    const auto inst = fairy_instance(p, static_cast<std::uint64_t>(i));
    auto cfg = inst.config;
    cfg.starts = 32;
    auto run = inst;
    run.config = cfg;
    const auto sol = harness::solve(run);
    const auto rep = harness::verify(run, sol);
    const auto o = harness::local_oracle(run, sol, 7, 0.02);
    worst_res = std::max(worst_res, rep.residual_norm);
    worst_sandwich = std::max(worst_sandwich, o.min_residual - (rep.residual_norm + 1e-6));
  }
  out.pass = worst_res <= 1e-6 && worst_sandwich <= 0.0;
  out.detail = fmt("20 instances; max residual %.2e (tol 1e-6); local oracle min minus (solver + 1e-6) at most %.2e",
                   worst_res, worst_sandwich);
  return out;
}

Outcome rotation() {
  Outcome out;
  double worst_gap = 0.0, worst_origin = 0.0, worst_vertical = 0.0;
  for (int i = 0; i < 10; ++i) {
    CounterRng rng(5000 + static_cast<std::uint64_t>(i), 0);
    const auto mu = cloud(rng, 2, 3, 9, 0.0, 0.1);
    const std::vector<MassAssignment> fs{cloud(rng, 2, 3, 8, 0.6, 0.1), cloud(rng, 2, 3, 8, -0.6, 0.1)};
    SolverConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(i);
    const auto sol = flagsolve::solve_rotation(3, 2, mu, fs, cfg);
    const auto& s2 = sol.s_k;
    worst_origin = std::max(worst_origin, s2.distance(Vec::Zero(3)));
    const Vec e3 = Vec::Unit(3, 2);
    worst_vertical = std::max(worst_vertical, (e3 - s2.project_direction(e3)).norm());
    const auto plus = sol.fairy.flag.plus_side(1);
    worst_gap = std::max(worst_gap, std::abs(gap(mu, plus)));
    for (const auto& f : fs) worst_gap = std::max(worst_gap, std::abs(gap(f, plus)));
  }
  out.pass = worst_gap <= 1e-6 && worst_origin <= 1e-6 && worst_vertical <= 1e-6;
  out.detail = fmt("10 instances; S_2 distance to origin %.2e, e_3 off S_2 %.2e, S_1 gaps %.2e (tol 1e-6)",
                   worst_origin, worst_vertical, worst_gap);
  return out;
}

Outcome lemma24() {
  Outcome out;
  const auto free_floor = harness::grid_oracle(harness::demo_lemma24(), 200);
  const auto problem = flagsolve::lemma24_problem(2, 1);
  const auto own = harness::grid_oracle(fairy_instance(problem, 0), 200);
  SolverConfig cfg;
  const auto sol = flagsolve::solve_fairy(problem, cfg);
  const double rel = std::abs(sol.residual_norm - own.min_residual) / own.min_residual;
  out.pass = free_floor.min_residual > 0.0 && own.min_residual > 0.0 && !sol.converged && rel <= 0.10;
  out.detail = fmt("floor over (angle, offset, point) at 200^3 = %.6f; floor over solver frames at 200 = %.6f; "
                   "solver %s with %.6f (%.2f%% from floor, tol 10%%)",
                   free_floor.min_residual, own.min_residual, sol.converged ? "converged" : "NotConverged",
                   sol.residual_norm, 100.0 * rel);
  return out;
}

Outcome parity() {
  Outcome out;
  double worst = 0.0, smallest_even = std::numeric_limits<double>::infinity();
  for (int d = 1; d <= 4; ++d) {
    for (int i = 0; i < 500; ++i) {
      const double t = -1.0 + 3.0 * i / 499.0;
      const double c = kinetic::parity_det_closed(d, t);
      worst = std::max(worst, std::abs(c - kinetic::parity_det_direct(d, t)));
      if (d % 2 == 0) smallest_even = std::min(smallest_even, std::abs(c));
    }
  }
  const double at = kinetic::parity_det_direct(1, 0.5);
  const double before = kinetic::parity_det_direct(1, 0.5 - 1e-12);
  const double after = kinetic::parity_det_direct(1, 0.5 + 1e-12);
  const bool zero_at_half = std::abs(at) <= 1e-12 && before > 0.0 && after < 0.0;
  out.pass = worst <= 1e-10 && smallest_even > 1e-8 && zero_at_half;
  out.detail = fmt("d=1..4 x 500 samples on [-1, 2]: max |closed - direct| %.2e (tol 1e-10); min |det| for even d "
                   "%.3e; d=1 det(1/2) = %.1e with sign change across 1/2 +- 1e-12: %s",
                   worst, smallest_even, at, zero_at_half ? "yes" : "no");
  return out;
}

kinetic::MovingFamily random_moving(CounterRng& rng, int d, int n, double sigma) {
  kinetic::MovingFamily f;
  f.sigma = sigma;
  for (int i = 0; i < n; ++i) f.points.push_back({rng.normal_vector(d), 0.5 * rng.normal_vector(d), 1.0});
  return f;
}

Outcome moving_points() {
  Outcome out;
  const auto floor = harness::grid_oracle(harness::demo_moving_points(), 500);
  Instance inst;
  inst.kind = Kind::Dynamic;
  inst.d = 3;
  inst.config.seed = 3;
  inst.config.starts = 32;
  CounterRng rng(6000, 0);
  for (int i = 0; i < 4; ++i) inst.moving.push_back(random_moving(rng, 3, 8, 0.05));
  const auto sol = harness::solve(inst);
  const auto rep = harness::verify(inst, sol);
  out.pass = floor.min_residual > 0.0 && rep.pass && rep.residual_norm <= 1e-6;
  out.detail = fmt("three moving points floor at 500x500 = %.6f; d=3 four families: %s zero at %s, verified "
                   "residual %.2e (tol 1e-6), verify %s",
                   floor.min_residual, sol.converged ? "found" : "no", sol.boundary ? "boundary" : "interior",
                   rep.residual_norm, rep.pass ? "pass" : "fail");
  return out;
}

kinetic::LineFamilyMeasure random_lines(CounterRng& rng, int d, int n, double sigma) {
  kinetic::LineFamilyMeasure f;
  f.sigma = sigma;
  for (int i = 0; i < n; ++i) f.lines.push_back({rng.normal_vector(d), rng.unit_vector(d), 1.0});
  return f;
}

Outcome line_families() {
  Outcome out;
  int interior = 0, boundary = 0, failed = 0, global_match = 0;
  double worst = 0.0, beaten = 0.0, local = 0.0;
  for (int i = 0; i < 10; ++i) {
    Instance inst;
    inst.kind = Kind::Horizontal;
    inst.d = 3;
    inst.config.seed = static_cast<std::uint64_t>(i);
    inst.config.starts = 32;
    CounterRng rng(7000 + static_cast<std::uint64_t>(i), 0);
    for (int j = 0; j < 3; ++j) inst.lines.push_back(random_lines(rng, 3, 10, 0.05));
    const auto sol = harness::solve(inst);
    const auto o = harness::grid_oracle(inst, 64);
    const auto rep = harness::verify(inst, sol, o);
    const auto near = harness::local_oracle(inst, sol, 9, 0.01);
    (sol.boundary ? boundary : interior) += 1;
    if (!rep.pass) ++failed;
    worst = std::max(worst, rep.residual_norm);
    beaten = std::max(beaten, rep.residual_norm - o.min_residual);
    local = std::max(local, near.min_residual - rep.residual_norm);
    if (o.min_residual <= rep.residual_norm + 1e-6) ++global_match;
  }
  out.pass = failed == 0 && worst <= 1e-6 && beaten <= 1e-6 && local <= 1e-6;
  out.detail = fmt("10 instances: %d interior, %d boundary, %d failing verify; max verified residual %.2e (tol 1e-6); "
                   "solver minus global 64x64 oracle at most %.2e, local oracle minus solver at most %.2e (tol 1e-6); "
                   "global grid alone reached the solver on %d/10",
                   interior, boundary, failed, worst, beaten, local, global_match);
  return out;
}

// Closed half-plane depth by enumerating every critical direction and one
// direction inside each arc between consecutive critical directions.
double enumerated_depth(const FlatMeasure& m, const Vec& x) {
  const Mat& c = m.atom_coords();
  const Vec& w = m.atom_weights();
  std::vector<double> crit;
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    const Vec dx = c.col(j) - x;
    if (dx.norm() == 0.0) continue;
    const double a = std::atan2(dx(1), dx(0));
    crit.push_back(std::remainder(a + 0.5 * pi, 2.0 * pi));
    crit.push_back(std::remainder(a - 0.5 * pi, 2.0 * pi));
  }
  std::sort(crit.begin(), crit.end());
  std::vector<double> dirs = crit;
  for (std::size_t i = 0; i < crit.size(); ++i) {
    const double next = i + 1 < crit.size() ? crit[i + 1] : crit.front() + 2.0 * pi;
    dirs.push_back(0.5 * (crit[i] + next));
  }
  if (dirs.empty()) dirs.push_back(0.0);
  double best = w.sum();
  for (double t : dirs) {
    const Vec u{{std::cos(t), std::sin(t)}};
    best = std::min(best, m.mass_above(u, u.dot(x)));
  }
  return best / w.sum();
}

Outcome transversal_321() {
  Outcome out;
  double worst_depth = 1.0, worst_origin = 0.0;
  int vertical = 0, fixtures = 0, mismatches = 0, passed = 0;
  for (int i = 0; i < 10; ++i) {
    Instance inst;
    inst.kind = Kind::Transversal;
    inst.d = 3;
    inst.k = 2;
    inst.lambda = 1;
    inst.config.seed = static_cast<std::uint64_t>(i);
    inst.config.starts = 16;
    CounterRng rng(8000 + static_cast<std::uint64_t>(i), 0);
    for (int j = 0; j < 3; ++j) inst.assignments.push_back(cloud(rng, 2, 3, 9, 0.4 * j, 0.0));
    const auto sol = harness::solve(inst);
    const auto rep = harness::verify(inst, sol);
    if (rep.pass) ++passed;
    for (const auto& m : rep.masses) worst_depth = std::min(worst_depth, m.plus);
    worst_origin = std::max(worst_origin, sol.s_k->distance(Vec::Zero(3)));
    if (geom::is_k_vertical(*sol.s_k, 1, 1e-6)) ++vertical;

    // Depth fixtures: each cloud projected to M, queried at L, at the atoms and at random points.
    const auto& s_k = *sol.s_k;
    for (const auto& a : inst.assignments) {
      const auto on_s = masses::assign(a, s_k);
      std::vector<Vec> queries{s_k.coordinates(sol.l->base())};
      for (Eigen::Index j = 0; j < on_s.atom_coords().cols(); ++j) queries.push_back(on_s.atom_coords().col(j));
      for (int r = 0; r < 10; ++r) queries.push_back(rng.normal_vector(2));
      for (const auto& x : queries) {
        ++fixtures;
        if (transversal::tukey_depth(on_s, x) != enumerated_depth(on_s, x)) ++mismatches;
      }
    }
  }
  out.pass = passed == 10 && worst_depth >= 0.5 - 1e-6 && vertical == 10 && worst_origin <= 1e-6 && mismatches == 0;
  out.detail = fmt("10 instances, %d verified; min depth %.6f (need >= 1/2 - 1e-6); %d/10 S_2 1-vertical, distance "
                   "to origin %.2e; tukey_depth vs enumeration: %d/%d fixtures differ",
                   passed, worst_depth, vertical, worst_origin, mismatches, fixtures);
  return out;
}

Outcome masses_invariants() {
  Outcome out;
  double cap = 0.0;
  for (int k = 1; k <= 6; ++k) {
    for (double r : {0.5, 1.0, 2.5}) {
      for (int i = 0; i <= 200; ++i) {
        const double h = -1.2 * r + 2.4 * r * i / 200.0;
        const double sum = masses::ball_cap_volume(k, h, r) + masses::ball_cap_volume(k, -h, r);
        cap = std::max(cap, std::abs(sum - masses::ball_volume(k, r)) / masses::ball_volume(k, r));
      }
    }
  }
  int antisym_fail = 0, antisym = 0;
  CounterRng rng(9000, 0);
  for (int i = 0; i < 50; ++i) {
    const int d = 1 + i % 3;
    const auto a = cloud(rng, d, d, 3 + i % 6, 0.0, i % 2 ? 0.1 : 0.0);
    const auto m = masses::assign(a, geom::Flat::whole_space(d));
    const Vec u = rng.unit_vector(d);
    ++antisym;
    if (masses::median_offset(m, -u) != -masses::median_offset(m, u)) ++antisym_fail;
  }
  const std::vector<double> vals{0.0, 1.0, 2.0, 5.0}, ws(4, 1.0);
  const double med = masses::weighted_median(vals, ws);
  out.pass = cap <= 1e-10 && antisym_fail == 0 && med == 1.5;
  out.detail = fmt("cap complementarity max rel err %.2e (tol 1e-10); median antisymmetry %d/%d exact; "
                   "median{0,1,2,5} = %.17g",
                   cap, antisym - antisym_fail, antisym, med);
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all{
      {1, "equivariance", 30.0, equivariance},
      {2, "trivial permutation vs iterated ham-sandwich cuts", 60.0, trivial_permutation},
      {3, "permutation (1,2,0)", 300.0, nontrivial_permutation},
      {4, "rotation case d=3 k=2", 120.0, rotation},
      {5, "three balls d=2 k=1 (negative)", 120.0, lemma24},
      {6, "parity determinant", 60.0, parity},
      {7, "moving points dichotomy", 300.0, moving_points},
      {8, "line families d=3", 300.0, line_families},
      {9, "center transversal (3,2,1)", 300.0, transversal_321},
      {10, "masses invariants", 60.0, masses_invariants},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = o.pass && secs < c.limit_s;
    if (!ok) ++failed;
    std::printf("[%s] %2d %s: %s; %.1f s (limit %.0f s)\n", ok ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                c.limit_s);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}

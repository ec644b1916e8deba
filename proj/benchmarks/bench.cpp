#include <benchmark/benchmark.h>

#include "masspart/harness.hpp"
#include "masspart/random.hpp"

using namespace masspart;

namespace {

masses::MassAssignment cloud(CounterRng& rng, int dim, int d, int n, double sigma) {
  Mat pts(d, n);
  for (int j = 0; j < n; ++j) pts.col(j) = rng.normal_vector(d);
  const auto a = masses::MassAssignment::projected_cloud(dim, pts, Vec::Ones(n));
  return sigma > 0.0 ? masses::mollify(a, sigma) : a;
}

flagsolve::FairyProblem fairy(int d, int n) {
  CounterRng rng(1, 0);
  flagsolve::FairyProblem p;
  p.d = d;
  p.k = 1;
  for (int i = d - 1; i >= 0; --i) p.pi.push_back(i);
  for (int i = d - 1; i >= 0; --i) {
    flagsolve::FairyLevel lvl{cloud(rng, i + 1, d, n, 0.2), {}};
    for (int j = 0; j < i; ++j) lvl.functionals.push_back(cloud(rng, i + 1, d, n, 0.2));
    p.levels.push_back(std::move(lvl));
  }
  return p;
}

void BM_evaluate_F_pi(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto p = fairy(d, static_cast<int>(state.range(1)));
  CounterRng rng(2, 0);
  const geom::Frame f(random_orthogonal(rng, d));
  for (auto _ : state) benchmark::DoNotOptimize(flagsolve::evaluate_F_pi(p, f));
}
BENCHMARK(BM_evaluate_F_pi)->Args({2, 20})->Args({3, 20})->Args({4, 20})->Args({3, 200});

void BM_transversal_map(benchmark::State& state) {
  CounterRng rng(3, 0);
  transversal::TransversalProblem p{3, 2, 1, {}};
  for (int j = 0; j < 3; ++j) p.assignments.push_back(cloud(rng, 2, 3, static_cast<int>(state.range(0)), 0.0));
  const geom::Frame f(random_orthogonal(rng, 3).leftCols(2));
  for (auto _ : state) benchmark::DoNotOptimize(transversal::evaluate_transversal_map(p, f));
}
BENCHMARK(BM_transversal_map)->Arg(10)->Arg(100);

void BM_tukey_depth(benchmark::State& state) {
  CounterRng rng(4, 0);
  const double sigma = state.range(1) ? 0.1 : 0.0;
  const auto m = masses::assign(cloud(rng, 2, 2, static_cast<int>(state.range(0)), sigma), geom::Flat::whole_space(2));
  const Vec x = Vec::Zero(2);
  for (auto _ : state) benchmark::DoNotOptimize(transversal::tukey_depth(m, x));
}
BENCHMARK(BM_tukey_depth)->Args({100, 0})->Args({1000, 0})->Args({100, 1});

void BM_median_offset(benchmark::State& state) {
  CounterRng rng(5, 0);
  const auto m = masses::assign(cloud(rng, 3, 3, static_cast<int>(state.range(0)), 0.1), geom::Flat::whole_space(3));
  const Vec u = rng.unit_vector(3);
  for (auto _ : state) benchmark::DoNotOptimize(masses::median_offset(m, u));
}
BENCHMARK(BM_median_offset)->Arg(100)->Arg(1000);

void BM_horizontal_residual(benchmark::State& state) {
  CounterRng rng(6, 0);
  std::vector<kinetic::LineFamilyMeasure> fams(3);
  for (auto& f : fams) {
    f.sigma = 0.05;
    for (int i = 0; i < state.range(0); ++i) f.lines.push_back({rng.normal_vector(3), rng.unit_vector(3), 1.0});
  }
  const kinetic::KineticState s{Vec{{0.6, 0.8, 0.0}}, 0.3};
  for (auto _ : state) benchmark::DoNotOptimize(kinetic::horizontal_residual(fams, s));
}
BENCHMARK(BM_horizontal_residual)->Arg(10)->Arg(100);

void BM_solve_rotation_demo(benchmark::State& state) {
  const auto inst = harness::demo_rotation();
  for (auto _ : state) benchmark::DoNotOptimize(harness::solve(inst));
}
BENCHMARK(BM_solve_rotation_demo)->Unit(benchmark::kMillisecond);

void BM_grid_oracle_lemma24(benchmark::State& state) {
  const auto inst = harness::demo_lemma24();
  const int res = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(harness::grid_oracle(inst, res));
}
BENCHMARK(BM_grid_oracle_lemma24)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

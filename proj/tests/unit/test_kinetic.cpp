#include <cmath>
#include <vector>

#include "doctest.h"
#include "masspart/kinetic.hpp"
#include "masspart/random.hpp"

using namespace masspart;
using namespace masspart::kinetic;

namespace {

LineFamilyMeasure random_lines(CounterRng& rng, int d, int n, double sigma) {
  LineFamilyMeasure f;
  f.sigma = sigma;
  for (int i = 0; i < n; ++i) f.lines.push_back({rng.normal_vector(d), rng.unit_vector(d), 1.0});
  return f;
}

MovingFamily random_moving(CounterRng& rng, int d, int n, double sigma) {
  MovingFamily f;
  f.sigma = sigma;
  for (int i = 0; i < n; ++i) f.points.push_back({rng.normal_vector(d), 0.5 * rng.normal_vector(d), 1.0});
  return f;
}

HyperplaneFamilyMeasure random_hyperplanes(CounterRng& rng, int d, int n, double sigma) {
  HyperplaneFamilyMeasure f;
  f.sigma = sigma;
  for (int i = 0; i < n; ++i) {
    Vec nrm = rng.unit_vector(d);
    if (nrm(d - 1) < 0) nrm = -nrm;
    nrm(d - 1) += 0.3;
    f.hyperplanes.push_back({nrm.normalized(), rng.normal(), 1.0});
  }
  return f;
}

// Line through p with direction u, and its mirror images under x -> -x and z -> -z.
void add_symmetric(LineFamilyMeasure& f, const Vec& p, const Vec& u) {
  for (double sx : {1.0, -1.0}) {
    for (double sz : {1.0, -1.0}) {
      Vec q = p, w = u;
      q(0) *= sx;
      w(0) *= sx;
      q(2) *= sz;
      w(2) *= sz;
      f.lines.push_back({q, w.normalized(), 1.0});
    }
  }
}

}  // namespace

TEST_CASE("vertical speed examples") {
  const Line l{Vec::Zero(3), Vec{{1.0, 0.0, 1.0}}.normalized(), 1.0};
  CHECK(vertical_speed(l, Vec::Unit(3, 0)) == doctest::Approx(1.0));
  CHECK(vertical_speed(l, -Vec::Unit(3, 0)) == doctest::Approx(-1.0));
  const Line flipped{Vec::Zero(3), -l.direction, 1.0};
  CHECK(vertical_speed(flipped, Vec::Unit(3, 0)) == vertical_speed(l, Vec::Unit(3, 0)));
  const Line flat{Vec::Zero(3), Vec::Unit(3, 0), 1.0};
  CHECK(vertical_speed(flat, Vec::Unit(3, 0)) == 0.0);
  try {
    vertical_speed(l, Vec::Unit(3, 1));
    FAIL("expected OrthogonalLine");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OrthogonalLine);
  }
}

TEST_CASE("hyperplane speed examples") {
  const Hyperplane h{Vec{{1.0, 0.0, 1.0}}.normalized(), 0.0, 1.0};
  CHECK(hyperplane_speed(h, Vec::Unit(3, 0)) == doctest::Approx(-1.0));
  CHECK(hyperplane_speed(h, -Vec::Unit(3, 0)) == doctest::Approx(1.0));
  CHECK(hyperplane_speed({Vec::Unit(3, 2), 2.0, 1.0}, Vec::Unit(3, 1)) == 0.0);
  try {
    hyperplane_speed({Vec::Unit(3, 0), 0.0, 1.0}, Vec::Unit(3, 1));
    FAIL("expected VerticalNormalDegenerate");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::VerticalNormalDegenerate);
  }
}

TEST_CASE("median speed midpoint rule") {
  MovingFamily f;
  for (double s : {0.0, 1.0, 2.0, 5.0}) f.points.push_back({Vec::Zero(2), Vec{{s, 0.0}}, 1.0});
  CHECK(median_speed(f, Vec::Unit(2, 0)) == 1.5);
  MovingFamily g;
  for (double s : {-1.0, 1.0}) g.points.push_back({Vec::Zero(2), Vec{{s, 0.0}}, 1.0});
  CHECK(median_speed(g, Vec::Unit(2, 0)) == 0.0);
  CHECK_THROWS_AS(median_speed(MovingFamily{}, Vec::Unit(2, 0)), Error);
}

TEST_CASE("median speeds are antisymmetric") {
  CounterRng rng(51, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto lines = random_lines(rng, 3, 9, trial % 2 ? 0.05 : 0.0);
    const auto moving = random_moving(rng, 3, 8, trial % 2 ? 0.05 : 0.0);
    const auto planes = random_hyperplanes(rng, 3, 7, trial % 2 ? 0.05 : 0.0);
    Vec v = rng.unit_vector(2);
    Vec vh = Vec::Zero(3);
    vh.head(2) = v;
    CHECK(std::abs(median_speed(lines, -vh) + median_speed(lines, vh)) <= 1e-12);
    CHECK(std::abs(median_speed(planes, -vh) + median_speed(planes, vh)) <= 1e-12);
    const Vec u = rng.unit_vector(3);
    CHECK(std::abs(median_speed(moving, -u) + median_speed(moving, u)) <= 1e-12);
  }
}

TEST_CASE("lines orthogonal to v are dropped") {
  LineFamilyMeasure f;
  f.lines.push_back({Vec::Zero(3), Vec::Unit(3, 1), 1.0});
  f.lines.push_back({Vec::Zero(3), Vec{{1.0, 0.0, 1.0}}.normalized(), 1.0});
  const auto t = line_tracks(f, Vec::Unit(3, 0));
  CHECK(t.dropped == 1);
  CHECK(t.items.size() == 1);
}

TEST_CASE("symmetric line families are bisected by x = 0 and z = 0") {
  CounterRng rng(52, 0);
  std::vector<LineFamilyMeasure> fams(3);
  for (auto& f : fams) {
    for (int j = 0; j < 3; ++j) add_symmetric(f, rng.normal_vector(3), rng.unit_vector(3));
  }
  const auto sol = horizontal_at(fams, {Vec::Unit(3, 0), 0.0});
  CHECK(sol.residual_norm == 0.0);
  CHECK(sol.pivot == doctest::Approx(0.0));
  const auto s2 = sol.vertical_hyperplane();
  const auto s1 = sol.horizontal_flat();
  CHECK(s2.contains(Vec::Unit(3, 1)));
  CHECK(s2.contains(Vec::Unit(3, 2)));
  CHECK(s1.contains(Vec::Unit(3, 1)));
  CHECK_FALSE(s1.contains(Vec::Unit(3, 2)));
}

TEST_CASE("identical families give a boundary zero") {
  CounterRng rng(53, 0);
  const auto f = random_lines(rng, 3, 7, 0.0);
  const std::vector<LineFamilyMeasure> fams{f, f, f};
  const auto sol = horizontal_at(fams, {Vec::Unit(3, 0), 1.0});
  CHECK(sol.boundary);
  CHECK(sol.residual_norm == 0.0);
  CHECK(sol.median_speeds[0] == sol.median_speeds[2]);
}

TEST_CASE("interior residual approaches the boundary one") {
  CounterRng rng(54, 0);
  std::vector<LineFamilyMeasure> fams;
  for (int i = 0; i < 3; ++i) fams.push_back(random_lines(rng, 3, 12, 0.1));
  const Vec v = Vec{{0.6, 0.8, 0.0}};
  const Vec limit = horizontal_residual(fams, {v, 1.0});
  double prev = std::numeric_limits<double>::infinity();
  for (double tau : {0.9, 0.99, 0.999}) {
    const double gap = (horizontal_residual(fams, {v, tau}) - limit).norm();
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev < 0.05);
}

TEST_CASE("dynamic ends are opposite") {
  CounterRng rng(55, 0);
  std::vector<MovingFamily> fams;
  for (int i = 0; i < 4; ++i) fams.push_back(random_moving(rng, 3, 6, 0.05));
  const Vec v = rng.unit_vector(3);
  CHECK(dynamic_residual(fams, {v, -1.0}) == -dynamic_residual(fams, {v, 1.0}));
  CHECK((dynamic_residual(fams, {v, 0.3}) + dynamic_residual(fams, {-v, 0.3})).norm() < 1e-9);
}

TEST_CASE("static symmetric clouds are bisected at time zero") {
  std::vector<MovingFamily> fams(3);
  CounterRng rng(56, 0);
  for (auto& f : fams) {
    for (int j = 0; j < 3; ++j) {
      const Vec p = rng.normal_vector(2);
      f.points.push_back({p, Vec::Zero(2), 1.0});
      f.points.push_back({-p, Vec::Zero(2), 1.0});
    }
  }
  const auto sol = dynamic_at(fams, {rng.unit_vector(2), 0.0});
  CHECK(sol.residual_norm == 0.0);
  CHECK(sol.param == 0.0);
  CHECK(sol.dynamic_hyperplane().contains(Vec::Zero(2)));
  CHECK_FALSE(sol.warnings.empty());
}

TEST_CASE("translated line for symmetric hyperplanes") {
  std::vector<HyperplaneFamilyMeasure> fams(2);
  CounterRng rng(57, 0);
  for (auto& f : fams) {
    for (int j = 0; j < 3; ++j) {
      Vec n = rng.unit_vector(2);
      if (n(1) < 0) n = -n;
      const double c = rng.normal();
      f.hyperplanes.push_back({n, c, 1.0});
      f.hyperplanes.push_back({n, -c, 1.0});
    }
  }
  const auto sol = translated_line_at(fams, {Vec::Unit(2, 0), 0.0});
  CHECK(sol.residual_norm == 0.0);
  CHECK(sol.split_point().norm() < 1e-12);
  CHECK(sol.translated_line().contains(Vec::Unit(2, 1)));
}

TEST_CASE("parity determinant") {
  CHECK(parity_det_closed(2, 0.5) == doctest::Approx(0.25));
  CHECK(parity_det_direct(2, 0.5) == doctest::Approx(0.25));
  for (int d = 2; d <= 6; d += 2) CHECK(parity_det_direct(d, 0.0) == doctest::Approx(1.0));
  CHECK(std::abs(parity_det_direct(1, 0.5)) < 1e-12);
  for (int d = 1; d <= 4; ++d) {
    for (int i = 0; i <= 100; ++i) {
      const double t = -5.0 + 0.1 * i;
      CHECK(std::abs(parity_det_closed(d, t) - parity_det_direct(d, t)) <= 1e-10 * std::max(1.0, std::abs(parity_det_closed(d, t))));
    }
  }
  try {
    parity_counterexample(3);
    FAIL("expected OddDimension");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OddDimension);
  }
}

TEST_CASE("parity instance stays on the plane") {
  const auto inst = parity_counterexample(4);
  REQUIRE(inst.families.size() == 5);
  for (const auto& f : inst.families) {
    for (double t : {-3.0, 0.2, 7.0}) CHECK((f.points[0].p + t * f.points[0].w).sum() == doctest::Approx(1.0));
  }
}

TEST_CASE("three moving points are never collinear") {
  const auto fams = three_moving_points();
  double smallest = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 2000; ++i) {
    const double t = -10.0 + 0.01 * i;
    std::vector<Vec> x;
    for (const auto& f : fams) x.push_back(f.points[0].p + t * f.points[0].w);
    const Vec a = x[1] - x[0], b = x[2] - x[0];
    smallest = std::min(smallest, std::abs(a(0) * b(1) - a(1) * b(0)));
  }
  CHECK(smallest > 0.1);
}

TEST_CASE("solvers converge on seeded mollified instances") {
  CounterRng rng(58, 0);
  SolverConfig cfg;
  cfg.seed = 1;
  cfg.starts = 32;
  std::vector<LineFamilyMeasure> lines;
  for (int i = 0; i < 3; ++i) lines.push_back(random_lines(rng, 3, 10, 0.05));
  const auto h = horizontal_solve(3, lines, cfg);
  CHECK(h.converged);
  std::vector<MovingFamily> moving;
  for (int i = 0; i < 4; ++i) moving.push_back(random_moving(rng, 3, 8, 0.05));
  const auto dyn = dynamic_solve(3, moving, cfg);
  CHECK(dyn.converged);
  std::vector<HyperplaneFamilyMeasure> planes;
  for (int i = 0; i < 3; ++i) planes.push_back(random_hyperplanes(rng, 3, 8, 0.05));
  const auto tl = translated_line_solve(3, planes, cfg);
  CHECK(tl.converged);
}

#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "masspart/flagsolve.hpp"
#include "masspart/random.hpp"

using namespace masspart;
using namespace masspart::flagsolve;
using masses::MassAssignment;

namespace {

MassAssignment cloud(CounterRng& rng, int dim, int d, int n, double shift) {
  Mat pts(d, n);
  for (int j = 0; j < n; ++j) pts.col(j) = rng.normal_vector(d) + Vec::Constant(d, shift);
  return MassAssignment::projected_cloud(dim, pts, Vec::Ones(n));
}

FairyProblem random_problem(CounterRng& rng, int d, int k, std::vector<int> pi) {
  FairyProblem p;
  p.d = d;
  p.k = k;
  p.pi = std::move(pi);
  for (int i = d - 1; i >= k - 1; --i) {
    FairyLevel lvl{masses::mollify(cloud(rng, i + 1, d, 7, 0.0), 0.2), {}};
    for (int j = 0; j < p.pi_of(i); ++j) lvl.functionals.push_back(masses::mollify(cloud(rng, i + 1, d, 6, 0.5 * j), 0.2));
    p.levels.push_back(std::move(lvl));
  }
  return p;
}

FairyProblem disk_problem() {
  FairyProblem p;
  p.d = 2;
  p.k = 1;
  p.pi = {1, 0};
  p.levels.push_back({MassAssignment::ball_section(2, Vec::Zero(2), 1.0),
                      {MassAssignment::ball_section(2, Vec{{1.0, 0.0}}, 1.0)}});
  p.levels.push_back({MassAssignment::projected_ball(1, Vec::Zero(2), 1.0), {}});
  return p;
}

}  // namespace

TEST_CASE("layout sizes") {
  CounterRng rng(1, 0);
  const auto p = random_problem(rng, 4, 2, {3, 1, 2});
  CHECK(p.residual_size() == 3 + 2 + 1);
  CHECK(p.block_offset(3) == 0);
  CHECK(p.block_offset(2) == 3);
  CHECK(p.block_offset(1) == 5);
}

TEST_CASE("median of a disk places the cut at its center") {
  FairyProblem p = disk_problem();
  p.levels[0].pivot = MassAssignment::ball_section(2, Vec{{2.0, 0.0}}, 1.0);
  const auto flag = flag_from_frame(p, geom::Frame::standard(2, 2));
  const auto& s1 = flag.at_dim(1).flat;
  CHECK(s1.contains(Vec{{2.0, 5.0}}));
  CHECK(s1.contains(Vec{{2.0, -1.0}}));
}

TEST_CASE("disk at (1,0) lies on the plus side") {
  const auto x = evaluate_F_pi(disk_problem(), geom::Frame::standard(2, 2));
  REQUIRE(x.size() == 1);
  CHECK(x(0) == doctest::Approx(std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("origin pivots give flats through the origin") {
  CounterRng rng(4, 0);
  const auto p = rotation_problem(4, 1, MassAssignment::ball_section(1, Vec::Zero(4), 1.0),
                                  {MassAssignment::zero(1, 4), MassAssignment::zero(1, 4), MassAssignment::zero(1, 4)});
  const geom::Frame f(random_orthogonal(rng, 4));
  const auto flag = flag_from_frame(p, f);
  for (const auto& lvl : flag.levels()) CHECK(lvl.flat.contains(Vec::Zero(4), 1e-12));
}

TEST_CASE("symmetric problem has zero residual") {
  CounterRng rng(9, 0);
  FairyProblem p;
  p.d = 3;
  p.k = 1;
  p.pi = {2, 1, 0};
  for (int i = 2; i >= 0; --i) {
    FairyLevel lvl{MassAssignment::ball_section(i + 1, Vec::Zero(3), 1.0), {}};
    for (int j = 0; j < i; ++j) lvl.functionals.push_back(MassAssignment::ball_section(i + 1, Vec::Zero(3), 0.5 + j));
    p.levels.push_back(lvl);
  }
  const geom::Frame f(random_orthogonal(rng, 3));
  CHECK(evaluate_F_pi(p, f).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("parallel directions are degenerate") {
  const auto p = disk_problem();
  Mat dirs(2, 2);
  dirs << 1, 1, 0, 0;
  try {
    flag_from_directions(p, dirs);
    FAIL("expected DegenerateDirection");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateDirection);
  }
}

TEST_CASE("sign flips act blockwise") {
  CounterRng rng(11, 0);
  const std::vector<std::vector<int>> perms{{3, 2, 1, 0}, {1, 3, 0, 2}, {0, 1, 2, 3}};
  for (const auto& pi : perms) {
    const auto p = random_problem(rng, 4, 1, pi);
    const geom::Frame f(random_orthogonal(rng, 4));
    const Vec base = evaluate_F_pi(p, f);
    for (int mask = 0; mask < 16; ++mask) {
      std::vector<int> s(4);
      for (int c = 0; c < 4; ++c) s[static_cast<std::size_t>(c)] = (mask >> c) & 1 ? -1 : 1;
      const Vec x = evaluate_F_pi(p, f.with_signs(s));
      for (int j = 3; j >= 0; --j) {
        const int sign = s[static_cast<std::size_t>(p.column_of(j))];
        for (int t = 0; t < j; ++t) CHECK(std::abs(x(p.block_offset(j) + t) - sign * base(p.block_offset(j) + t)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("pivots are bisected at every level") {
  CounterRng rng(12, 0);
  const auto p = random_problem(rng, 3, 1, {1, 2, 0});
  const geom::Frame f(random_orthogonal(rng, 3));
  const auto flag = flag_from_frame(p, f);
  for (int i = 2; i >= 0; --i) {
    const auto plus = flag.plus_side(i);
    const auto m = masses::assign(p.level(i).pivot, plus.carrier);
    CHECK(std::abs(masses::halfspace_mass(m, plus) - masses::halfspace_mass(m, plus.opposite())) <= 1e-9);
  }
}

TEST_CASE("rotation instance") {
  const auto r = rotation_instance(3, 2);
  CHECK(r.pi == std::vector<int>{1, 2});
  REQUIRE(r.level_balls.size() == 1);
  REQUIRE(r.level_balls[0].size() == 2);
  CHECK(r.level_balls[0][0].center() == Vec::Zero(3));
  CHECK(r.level_balls[0][1].center() == Vec::Unit(3, 2));
  CHECK(rotation_instance(3, 3).level_balls.empty());
  for (const auto& lvl : rotation_instance(4, 1).level_balls) CHECK(lvl.size() == 1);
}

TEST_CASE("lemma24 instance") {
  const auto a = lemma24_instance(2, 1);
  REQUIRE(a.size() == 3);
  CHECK(a[0].center() == Vec::Zero(2));
  CHECK(a[1].center() == Vec::Unit(2, 0));
  CHECK(a[2].center() == Vec::Unit(2, 1));
  CHECK(lemma24_instance(3, 2).size() == 4);
  const auto p = lemma24_problem(2, 1);
  CHECK(p.surplus_count() == 1);
  CHECK(p.residual_size() == 2);
}

TEST_CASE("too many functionals without surplus is rejected") {
  auto p = lemma24_problem(2, 1);
  p.allow_surplus = false;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("ham sandwich in the plane converges") {
  CounterRng rng(21, 0);
  const auto p = random_problem(rng, 2, 1, {1, 0});
  SolverConfig cfg;
  cfg.seed = 5;
  cfg.starts = 8;
  const auto sol = solve_fairy(p, cfg);
  CHECK(sol.converged);
  CHECK(sol.residual_norm <= 1e-6);
  CHECK((evaluate_F_pi(p, sol.frame) - sol.residual).norm() <= 1e-12);
}

TEST_CASE("solver is deterministic") {
  CounterRng rng(22, 0);
  const auto p = random_problem(rng, 3, 1, {1, 2, 0});
  SolverConfig cfg;
  cfg.seed = 3;
  cfg.starts = 8;
  const auto a = solve_fairy(p, cfg);
  const auto b = solve_fairy(p, cfg);
  CHECK(a.frame.vectors() == b.frame.vectors());
  CHECK(a.residual_norm == b.residual_norm);
}

#include <array>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "masspart/masses.hpp"
#include "masspart/random.hpp"

using namespace masspart;
using namespace masspart::masses;
using geom::Flat;

namespace {

Flat x_axis() {
  Mat dir(2, 1);
  dir << 1, 0;
  return Flat::through(Vec::Zero(2), dir);
}

MassAssignment cloud_on_line(std::initializer_list<double> xs, int ambient = 2) {
  Mat pts = Mat::Zero(ambient, static_cast<Eigen::Index>(xs.size()));
  int j = 0;
  for (double x : xs) {
    pts(0, j) = x;
    pts(1, j) = 0.25 * j;  // off-line component is projected away
    ++j;
  }
  return MassAssignment::projected_cloud(1, pts, Vec::Ones(j));
}

}  // namespace

TEST_CASE("midpoint tie-break on {0,1,2,5}") {
  const std::array<double, 4> v{0, 1, 2, 5};
  const std::array<double, 4> w{1, 1, 1, 1};
  CHECK(weighted_median(v, w) == 1.5);
  const auto m = assign(cloud_on_line({0, 1, 2, 5}), x_axis());
  CHECK(median_offset(m, Vec::Ones(1)) == 1.5);
  CHECK(median_offset(m, -Vec::Ones(1)) == -1.5);
}

TEST_CASE("weighted median with a heavy atom") {
  const std::array<double, 2> v{0, 1};
  const std::array<double, 2> w{1, 3};
  CHECK(weighted_median(v, w) == 1.0);
  const std::array<double, 3> odd{4, -2, 7};
  const std::array<double, 3> ones{1, 1, 1};
  CHECK(weighted_median(odd, ones) == 4.0);
}

TEST_CASE("weighted median of zero mass throws") {
  const std::array<double, 2> v{0, 1};
  const std::array<double, 2> w{0, 0};
  try {
    weighted_median(v, w);
    FAIL("expected ZeroMass");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroMass);
  }
}

TEST_CASE("closed half-line masses count boundary atoms on both sides") {
  const auto m = assign(cloud_on_line({0, 1, 2, 5}), x_axis());
  const Vec u = Vec::Ones(1);
  CHECK(m.total_mass() == 4.0);
  CHECK(m.mass_above(u, 2.0) == 2.0);
  CHECK(m.mass_below(u, 2.0) == 3.0);
  CHECK(m.mass_on_boundary(u, 2.0) == 1.0);
}

TEST_CASE("ball cap volumes") {
  const double pi = std::numbers::pi;
  CHECK(ball_volume(2, 1.0) == doctest::Approx(pi));
  CHECK(ball_volume(3, 2.0) == doctest::Approx(32.0 * pi / 3.0));
  CHECK(ball_cap_volume(2, 0.0, 1.0) == doctest::Approx(pi / 2));
  CHECK(ball_cap_volume(2, 0.5, 1.0) == doctest::Approx(0.6141848493043784).epsilon(1e-12));
  CHECK(ball_cap_volume(3, 0.5, 1.0) == doctest::Approx(0.6544984694978736).epsilon(1e-12));
  CHECK(ball_cap_volume(1, 0.25, 1.0) == doctest::Approx(0.75));
  CHECK(ball_cap_volume(3, 3.0, 1.0) == 0.0);
  CHECK(ball_cap_volume(3, -3.0, 1.0) == doctest::Approx(4.0 * pi / 3.0));
}

TEST_CASE("cap volume complementarity") {
  for (int k = 1; k <= 5; ++k) {
    for (double h : {-0.9, -0.3, 0.0, 0.2, 0.77}) {
      const double sum = ball_cap_volume(k, h, 1.3) + ball_cap_volume(k, -h, 1.3);
      CHECK(std::abs(sum - ball_volume(k, 1.3)) <= 1e-10 * ball_volume(k, 1.3));
    }
  }
}

TEST_CASE("projected ball on a flat through the center is split evenly") {
  const auto a = MassAssignment::projected_ball(1, Vec{{0.0, 3.0}}, 1.0);
  const auto m = assign(a, x_axis());
  CHECK(m.total_mass() == doctest::Approx(std::numbers::pi));
  CHECK(m.mass_above(Vec::Ones(1), 0.0) == doctest::Approx(std::numbers::pi / 2));
  CHECK(median_offset(m, Vec::Ones(1)) == doctest::Approx(0.0));
}

TEST_CASE("ball section shrinks with distance") {
  const auto a = MassAssignment::ball_section(1, Vec{{0.0, 0.6}}, 1.0);
  const auto m = assign(a, x_axis());
  CHECK(m.total_mass() == doctest::Approx(1.6));
  const auto far = assign(MassAssignment::ball_section(1, Vec{{0.0, 2.0}}, 1.0), x_axis());
  CHECK(far.total_mass() == 0.0);
}

TEST_CASE("line family meets a hyperplane") {
  std::vector<Line> lines;
  lines.push_back({Vec{{0.0, 0.0}}, Vec{{1.0, 1.0}}.normalized(), 1.0});
  lines.push_back({Vec{{0.0, 3.0}}, Vec{{0.0, 1.0}}, 2.0});
  lines.push_back({Vec{{0.0, 1.0}}, Vec{{1.0, 0.0}}, 1.0});  // parallel to the flat
  const auto fam = MassAssignment::line_family(lines);
  const auto m = assign(fam, x_axis());
  CHECK(m.dropped() == 1);
  CHECK(m.total_mass() == doctest::Approx(3.0));
  CHECK(m.mass_above(Vec::Ones(1), 0.0) == doctest::Approx(3.0));
}

TEST_CASE("median is exactly antisymmetric") {
  CounterRng rng(3, 1);
  Mat pts(3, 9);
  for (int j = 0; j < 9; ++j) pts.col(j) = rng.normal_vector(3);
  const auto m = assign(MassAssignment::projected_cloud(3, pts, Vec::Ones(9)), Flat::whole_space(3));
  const auto s = assign(mollify(MassAssignment::projected_cloud(3, pts, Vec::Ones(9)), 0.05), Flat::whole_space(3));
  for (int t = 0; t < 20; ++t) {
    const Vec u = rng.unit_vector(3);
    CHECK(median_offset(m, -u) == -median_offset(m, u));
    CHECK(median_offset(s, -u) == -median_offset(s, u));
  }
}

TEST_CASE("mollified median bisects") {
  CounterRng rng(5, 2);
  Mat pts(2, 7);
  for (int j = 0; j < 7; ++j) pts.col(j) = rng.normal_vector(2);
  const auto s = assign(mollify(MassAssignment::projected_cloud(2, pts, Vec::Ones(7)), 0.1), Flat::whole_space(2));
  const Vec u = rng.unit_vector(2);
  const double c = median_offset(s, u);
  CHECK(std::abs(s.mass_above(u, c) - s.mass_below(u, c)) < 1e-9);
}

TEST_CASE("mollify rejects non-discrete kinds") {
  const auto b = MassAssignment::ball_section(1, Vec::Zero(2), 1.0);
  try {
    mollify(b, 0.1);
    FAIL("expected UnsupportedKind");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedKind);
  }
}

TEST_CASE("half-space on another flat is rejected") {
  const auto m = assign(cloud_on_line({0, 1}), x_axis());
  const auto r2 = Flat::whole_space(2);
  const auto cut = geom::sub_flat(r2, Vec::Unit(2, 1), 0.0);
  try {
    halfspace_mass(m, cut.plus);
    FAIL("expected CarrierMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CarrierMismatch);
  }
}

TEST_CASE("dimension mismatch on assign") {
  const auto a = MassAssignment::projected_ball(2, Vec::Zero(3), 1.0);
  Mat dir(3, 1);
  dir << 1, 0, 0;
  CHECK_THROWS_AS(assign(a, Flat::through(Vec::Zero(3), dir)), Error);
}

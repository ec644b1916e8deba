#include "masspart/stiefel.hpp"

#include <cmath>

namespace masspart::stiefel {

int dof(int d, int m) { return m * (m - 1) / 2 + m * (d - m); }

std::vector<std::pair<int, int>> rotation_planes(int d, int m) {
  std::vector<std::pair<int, int>> planes;
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < d; ++b) planes.emplace_back(a, b);
  return planes;
}

FrameState normalized(Mat q, int m) {
  const auto d = q.cols();
  for (Eigen::Index j = 0; j < d; ++j) {
    Vec col = q.col(j);
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index i = 0; i < j; ++i) col -= q.col(i).dot(col) * q.col(i);
    q.col(j) = col / col.norm();
  }
  for (int j = 0; j < m; ++j) {
    const Vec col = q.col(j);
    if (col(geom::sign_pivot(col)) < 0.0) q.col(j) = -col;
  }
  return FrameState{std::move(q), m};
}

FrameState complete(const geom::Frame& frame) {
  const int d = frame.ambient_dim();
  const int m = frame.size();
  Mat q(d, d);
  q.leftCols(m) = frame.vectors();
  int filled = m;
  for (int e = 0; e < d && filled < d; ++e) {
    Vec col = Vec::Unit(d, e);
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i < filled; ++i) col -= q.col(i).dot(col) * q.col(i);
    if (col.norm() > 1e-6) q.col(filled++) = col / col.norm();
  }
  // Keep the frame vectors exactly as given; only the completion is new.
  FrameState s{std::move(q), m};
  return s;
}

search::Space<FrameState> frame_space(int d, int m) {
  const auto planes = rotation_planes(d, m);
  search::Space<FrameState> space;
  space.dof = static_cast<int>(planes.size());
  space.sample = [d, m](CounterRng& rng) { return normalized(random_orthogonal(rng, d), m); };
  space.retract = [d, m, planes](const FrameState& s, const Vec& delta) {
    Mat a = Mat::Zero(d, d);
    for (std::size_t j = 0; j < planes.size(); ++j) {
      const auto [p, r] = planes[j];
      a(p, r) = -delta(static_cast<Eigen::Index>(j));
      a(r, p) = delta(static_cast<Eigen::Index>(j));
    }
    const Mat eye = Mat::Identity(d, d);
    const Mat cayley = (eye - 0.5 * a).partialPivLu().solve(eye + 0.5 * a);
    return normalized(s.q * cayley, m);
  };
  return space;
}

FrameState from_angles(int d, int m, const Vec& angles) {
  const auto planes = rotation_planes(d, m);
  if (angles.size() != static_cast<Eigen::Index>(planes.size())) {
    throw Error(ErrorCode::DimensionMismatch, "one angle per rotation plane");
  }
  Mat q = Mat::Identity(d, d);
  for (std::size_t j = 0; j < planes.size(); ++j) {
    const auto [p, r] = planes[j];
    const double c = std::cos(angles(static_cast<Eigen::Index>(j)));
    const double s = std::sin(angles(static_cast<Eigen::Index>(j)));
    const Vec cp = q.col(p), cr = q.col(r);
    q.col(p) = c * cp + s * cr;
    q.col(r) = -s * cp + c * cr;
  }
  return normalized(std::move(q), m);
}

}  // namespace masspart::stiefel

#pragma once

#include <utility>
#include <vector>

#include "masspart/geom.hpp"
#include "masspart/search.hpp"

namespace masspart::stiefel {

/// A point of V_m(R^d) carried as a full orthogonal completion: the first m
/// columns of `q` are the frame.
struct FrameState {
  Mat q;
  int m = 0;

  geom::Frame frame() const { return geom::Frame(q.leftCols(m)); }
};

/// Dimension of V_m(R^d): (d-1) + (d-2) + ... + (d-m).
int dof(int d, int m);

/// Rotation planes (a, b), a < m, a < b < d, that move the frame. There are dof(d, m).
std::vector<std::pair<int, int>> rotation_planes(int d, int m);

/// Completes an orthonormal frame to an orthogonal matrix (frame columns first).
FrameState complete(const geom::Frame& frame);

/// Re-orthonormalizes the columns in order and fixes the sign of each frame vector.
FrameState normalized(Mat q, int m);

/// Search space over V_m(R^d): Haar starts, Cayley retraction on the rotation planes.
search::Space<FrameState> frame_space(int d, int m);

/// Product of Givens rotations over rotation_planes(d, m) (one angle each), applied to
/// the identity. Covers V_m(R^d) up to signs; used by the grid oracle.
FrameState from_angles(int d, int m, const Vec& angles);

}  // namespace masspart::stiefel

#pragma once

#include <vector>

#include "masspart/geom.hpp"
#include "masspart/masses.hpp"
#include "masspart/search.hpp"

namespace masspart::transversal {

using masses::FlatMeasure;
using masses::MassAssignment;
using search::SolverConfig;

/// d - k + lambda + 1 assignments of dimension k; common lambda-transversal wanted
/// on a lambda-vertical linear S_k. Only k - lambda <= 2 is supported.
struct TransversalProblem {
  int d = 0;
  int k = 0;
  int lambda = 0;
  std::vector<MassAssignment> assignments;

  void validate() const;
  int frame_size() const { return d - lambda; }
  /// Dimension of M, the complement of the transversal inside S_k.
  int m() const { return k - lambda; }
  /// (d-1) + (d-2) + ... + lambda.
  int residual_size() const;
  /// Offset of block x_i (1-based) inside the stacked residual.
  int block_offset(int i) const;
  double threshold() const { return 1.0 / (m() + 1); }
};

/// Convex region in carrier coordinates of a 1- or 2-dimensional flat.
/// dim 1: vertices = {lo, hi}; dim 2: polygon vertices counterclockwise
/// (possibly a segment or a single point).
struct Region {
  int dim = 0;
  std::vector<Vec> vertices;
};

/// Smallest closed half-flat fraction containing x (carrier coordinates).
/// Exact for discrete and ball measures; mollified 2-D measures use a dense
/// direction sweep with local refinement. Throws ZeroMass / UnsupportedDimension.
double tukey_depth(const FlatMeasure& m, const Vec& x);

/// {x : tukey_depth(x) >= threshold}. Throws EmptyRegion.
Region centerpoint_region(const FlatMeasure& m, double threshold);

/// Midpoint, area centroid, or vertex average of a degenerate polygon.
Vec region_barycenter(const Region& r);

struct TransversalSolution {
  geom::Frame frame = geom::Frame::standard(1, 1);
  geom::Flat s_k = geom::Flat::point(Vec::Zero(1));
  geom::Flat l = geom::Flat::point(Vec::Zero(1));
  /// Barycenters p_j as ambient points of M.
  std::vector<Vec> centers;
  /// Depth of L for each assignment on S_k.
  std::vector<double> depths;
  Vec residual;
  double residual_norm = 0.0;
  bool vertical = false;
  bool depth_ok = false;
  bool converged = false;
  double effective_target = 0.0;
  int best_start = -1;
  long evaluations = 0;
};

/// Everything the map computes at one frame.
struct TransversalState {
  std::vector<geom::HalfFlat> plus_sides;  // S_{d-1}^+, ..., S_k^+
  geom::Flat s_k = geom::Flat::point(Vec::Zero(1));
  Mat q;                                   // v_1..v_m in S_k coordinates
  std::vector<FlatMeasure> sigma;          // projections onto M
  std::vector<Vec> p;                      // barycenters in M coordinates
};

/// Throws DegenerateDirection / ZeroMass / EmptyRegion.
TransversalState transversal_state(const TransversalProblem& p, const Mat& directions);

/// The equivariant map on V_{d-lambda}(R^d), frame order v_1, ..., v_{d-lambda}.
Vec evaluate_transversal_map(const TransversalProblem& p, const geom::Frame& frame);

/// Builds the solution record (S_k, L, depths) at a frame.
TransversalSolution transversal_at(const TransversalProblem& p, const geom::Frame& frame);

TransversalSolution solve_center_transversal(const TransversalProblem& p, const SolverConfig& cfg);

}  // namespace masspart::transversal

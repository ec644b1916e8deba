#pragma once

#include <string>
#include <vector>

#include "masspart/geom.hpp"
#include "masspart/masses.hpp"
#include "masspart/search.hpp"

namespace masspart::kinetic {

using masses::Hyperplane;
using masses::Line;
using search::SolverConfig;

/// Weighted lines. sigma > 0 smooths each line's intersection height and
/// vertical speed by independent Gaussians of that scale.
struct LineFamilyMeasure {
  std::vector<Line> lines;
  double sigma = 0.0;
  void validate() const;
};

struct MovingPoint {
  Vec p;  // position at time 0
  Vec w;  // velocity
  double weight = 1.0;
};

/// Weighted moving points p + t w; sigma smooths position and speed.
struct MovingFamily {
  std::vector<MovingPoint> points;
  double sigma = 0.0;
  void validate() const;
};

struct HyperplaneFamilyMeasure {
  std::vector<Hyperplane> hyperplanes;
  double sigma = 0.0;
  void validate() const;
};

/// e_d-component of the motion of l cap H_{v,lambda} as lambda grows: n_d / <v, n>.
/// Throws OrthogonalLine when <v, n> vanishes.
double vertical_speed(const Line& line, const Vec& v);

/// -<n, v> / n_d. Throws VerticalNormalDegenerate when n_d vanishes.
double hyperplane_speed(const Hyperplane& h, const Vec& v);

/// Speed of a moving point in direction v: <v, w>.
double moving_speed(const MovingPoint& m, const Vec& v);

/// A member seen along one direction: value a + param * b, smoothed by sigma.
struct Track {
  double a = 0.0;
  double b = 0.0;
  double weight = 1.0;
};

struct Tracks {
  std::vector<Track> items;
  double sigma = 0.0;
  int dropped = 0;

  double total() const;
  /// Closed masses at finite parameter.
  double above(double param, double h) const;
  double below(double param, double h) const;
  /// Midpoint-rule median of the values at `param`.
  double median(double param) const;
  /// Limit masses as param -> +infinity, relative to a speed m.
  double above_limit(double m) const;
  double below_limit(double m) const;
  /// Midpoint-rule median of the speeds b.
  double median_speed() const;
};

/// Heights of lines on H_{v,lambda}: a = p_d - <p, v> z, b = z. Lines with <v, n> ~ 0 are dropped.
Tracks line_tracks(const LineFamilyMeasure& f, const Vec& v);
/// Offsets along v at time t: a = <p, v>, b = <w, v>.
Tracks moving_tracks(const MovingFamily& f, const Vec& v);
/// Heights on lambda v + span(e_d): a = c / n_d, b = m(H, v). Near-vertical normals are dropped.
Tracks hyperplane_tracks(const HyperplaneFamilyMeasure& f, const Vec& v);

/// Median vertical speed / median speed. Throws ZeroMass.
double median_speed(const LineFamilyMeasure& f, const Vec& v);
double median_speed(const MovingFamily& f, const Vec& v);
double median_speed(const HyperplaneFamilyMeasure& f, const Vec& v);

/// A point of the compactified configuration space: v on a sphere and tau.
struct KineticState {
  Vec v;
  double tau = 0.0;
};

enum class Problem { Horizontal, Dynamic, TranslatedLine };

/// Threshold for reporting a direction (boundary) outcome.
inline constexpr double boundary_tau = 1.0 - 1e-6;

struct KineticSolution {
  Problem problem = Problem::Horizontal;
  int d = 0;
  KineticState state;
  /// lambda = tau / (1 - tau) or t = tau / (1 - |tau|); infinite on the boundary.
  double param = 0.0;
  bool boundary = false;
  /// Pivot height / offset (finite param only).
  double pivot = 0.0;
  Vec residual;
  double residual_norm = 0.0;
  bool converged = false;
  double effective_target = 0.0;
  std::vector<double> median_speeds;
  std::vector<int> dropped;
  std::vector<std::string> warnings;

  /// Horizontal: S_{d-1} = H_{v, lambda} and the horizontal S_{d-2} at the pivot height.
  geom::Flat vertical_hyperplane() const;
  geom::Flat horizontal_flat() const;
  /// Translated line lambda v + span(e_d) and its split point.
  geom::Flat translated_line() const;
  Vec split_point() const;
  /// Dynamic: hyperplane {<x, v> = pivot} at time `param`.
  geom::Flat dynamic_hyperplane() const;
};

/// Residuals at one state; tau outside the boundary threshold uses the limit formulas.
Vec horizontal_residual(const std::vector<LineFamilyMeasure>& families, const KineticState& s);
Vec dynamic_residual(const std::vector<MovingFamily>& families, const KineticState& s);
Vec translated_line_residual(const std::vector<HyperplaneFamilyMeasure>& families, const KineticState& s);

/// Full record (pivot, speeds, drop counts, geometry) at one state.
KineticSolution horizontal_at(const std::vector<LineFamilyMeasure>& families, const KineticState& s);
KineticSolution dynamic_at(const std::vector<MovingFamily>& families, const KineticState& s);
KineticSolution translated_line_at(const std::vector<HyperplaneFamilyMeasure>& families, const KineticState& s);

/// d line families in R^d; v ranges over unit vectors orthogonal to e_d, tau over [0, 1].
KineticSolution horizontal_solve(int d, const std::vector<LineFamilyMeasure>& families, const SolverConfig& cfg);
/// d + 1 moving families in R^d; v over S^{d-1}, tau over [-1, 1]. Even d adds a parity warning.
KineticSolution dynamic_solve(int d, const std::vector<MovingFamily>& families, const SolverConfig& cfg);
/// d hyperplane families in R^d; v orthogonal to e_d, tau over [0, 1].
KineticSolution translated_line_solve(int d, const std::vector<HyperplaneFamilyMeasure>& families,
                                      const SolverConfig& cfg);

/// Smoothing scale picked from cfg (explicit mollify, or 1e-3 x diameter when continuity is required).
double smoothing_for(const SolverConfig& cfg, double diameter);
double data_diameter(const std::vector<LineFamilyMeasure>& families);
double data_diameter(const std::vector<MovingFamily>& families);
double data_diameter(const std::vector<HyperplaneFamilyMeasure>& families);

/// (1 - t)^{d+1} + (-1)^d t^{d+1}.
double parity_det_closed(int d, double t);
/// Determinant of the (d+1) x (d+1) bidiagonal matrix with corner entry, by LU.
double parity_det_direct(int d, double t);
Mat parity_matrix(int d, double t);

/// d + 1 single-point moving families (e_i, e_{i+1} - e_i) in R^{d+1}, living on
/// the plane where the coordinates sum to 1. Throws OddDimension.
struct ParityInstance {
  int d = 0;
  std::vector<MovingFamily> families;  // in R^{d+1}
};
ParityInstance parity_counterexample(int d);

/// The parity instance for d = 2 written in coordinates of the plane x + y + z = 1
/// centered at its centroid; each point smoothed by sigma.
std::vector<MovingFamily> three_moving_points(double sigma = 0.05);

}  // namespace masspart::kinetic

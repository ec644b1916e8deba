#pragma once

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "masspart/geom.hpp"

namespace masspart::masses {

enum class Kind {
  ProjectedCloud,    // weighted points, orthogonally projected to the flat
  ProjectedBall,     // uniform measure on a d-ball, orthogonally projected to the flat
  BallSection,       // volume of flat ∩ ball
  LineFamily,        // weighted lines, measure on a hyperplane = intersection points
  HyperplaneFamily,  // weighted hyperplanes, measure on a line = intersection points
  CustomHalfspaceFn, // opaque half-flat -> real evaluator
};

std::string_view to_string(Kind kind);

struct Line {
  Vec point;
  Vec direction;  // unit
  double weight = 1.0;
};

/// The hyperplane {x : <normal, x> = offset}.
struct Hyperplane {
  Vec normal;  // unit
  double offset = 0.0;
  double weight = 1.0;
};

/// Must be pure: the solvers call it from several threads.
using HalfspaceFn = std::function<double(const geom::HalfFlat&)>;

class FlatMeasure;

/// A rule producing a measure (or half-flat functional) on every flat of dimension dim().
class MassAssignment {
 public:
  static MassAssignment projected_cloud(int dim, Mat points, Vec weights);
  static MassAssignment projected_ball(int dim, Vec center, double radius);
  static MassAssignment ball_section(int dim, Vec center, double radius);
  /// Measure on hyperplanes (dim = d - 1).
  static MassAssignment line_family(std::vector<Line> lines);
  /// Measure on lines (dim = 1).
  static MassAssignment hyperplane_family(std::vector<Hyperplane> hyperplanes);
  static MassAssignment custom(int dim, int ambient_dim, HalfspaceFn fn, std::string label = "custom");
  /// The identically-zero functional; pads residual blocks.
  static MassAssignment zero(int dim, int ambient_dim);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  int ambient_dim() const { return ambient_dim_; }
  double mollify_sigma() const { return sigma_; }
  bool is_discrete() const {
    return kind_ == Kind::ProjectedCloud || kind_ == Kind::LineFamily || kind_ == Kind::HyperplaneFamily;
  }
  bool is_zero_functional() const { return kind_ == Kind::CustomHalfspaceFn && label_ == "zero"; }
  const std::string& label() const { return label_; }

  // ProjectedCloud
  const Mat& points() const { return points_; }
  const Vec& weights() const { return weights_; }
  // ProjectedBall / BallSection
  const Vec& center() const { return center_; }
  double radius() const { return radius_; }
  // LineFamily / HyperplaneFamily
  const std::vector<Line>& lines() const { return lines_; }
  const std::vector<Hyperplane>& hyperplanes() const { return hyperplanes_; }
  // CustomHalfspaceFn
  const HalfspaceFn& evaluator() const { return fn_; }

  /// Largest distance between payload points (line/hyperplane anchors for families).
  double data_diameter() const;

 private:
  friend MassAssignment mollify(const MassAssignment& a, double sigma);

  Kind kind_ = Kind::ProjectedCloud;
  int dim_ = 0;
  int ambient_dim_ = 0;
  double sigma_ = 0.0;
  Mat points_;
  Vec weights_;
  Vec center_;
  double radius_ = 0.0;
  std::vector<Line> lines_;
  std::vector<Hyperplane> hyperplanes_;
  HalfspaceFn fn_;
  std::string label_;
};

/// Each atom is replaced by an isotropic Gaussian of scale sigma. Throws
/// UnsupportedKind for ball and custom kinds.
MassAssignment mollify(const MassAssignment& a, double sigma);

/// A measure on a concrete flat, expressed in the flat's coordinates
/// (coordinates(x) = basis^T x since the base is nearest the origin).
class FlatMeasure {
 public:
  enum class Form { Atoms, Ball, Custom };

  static FlatMeasure atoms(geom::Flat carrier, Mat coords, Vec weights, double sigma, int dropped = 0);
  /// Ball-type measure: half-flat masses are caps of a cap_dim-ball of `radius`
  /// centered at `center` (carrier coordinates).
  static FlatMeasure ball(geom::Flat carrier, Vec center, double radius, int cap_dim);
  static FlatMeasure custom(geom::Flat carrier, HalfspaceFn fn);

  Form form() const { return form_; }
  const geom::Flat& carrier() const { return carrier_; }
  int dim() const { return carrier_.dim(); }

  const Mat& atom_coords() const { return coords_; }
  const Vec& atom_weights() const { return weights_; }
  double sigma() const { return sigma_; }
  bool mollified() const { return sigma_ > 0.0; }
  int dropped() const { return dropped_; }

  const Vec& ball_center() const { return center_; }
  double ball_radius() const { return radius_; }
  int cap_dim() const { return cap_dim_; }
  const HalfspaceFn& evaluator() const { return fn_; }

  /// Throws UnsupportedKind for custom measures.
  double total_mass() const;
  /// Mass of the closed half {y : <y, u> >= c} (carrier coordinates, u unit).
  /// Discrete atoms within tol::geo of the boundary count.
  double mass_above(const Vec& u, double c) const;
  /// Mass of the closed half {y : <y, u> <= c}.
  double mass_below(const Vec& u, double c) const { return mass_above(-u, -c); }
  /// Discrete atoms within tol::geo of {<y,u> = c}; zero for continuous forms.
  double mass_on_boundary(const Vec& u, double c) const;
  /// Largest c with mass_above(u, c) >= t * total_mass, t in (0, 1].
  /// Throws ZeroMass if the measure is empty.
  double quantile(const Vec& u, double t) const;
  /// Image under orthogonal projection onto span(q) (q: dim x m, orthonormal columns,
  /// carrier coordinates). The new carrier is the corresponding sub-flat.
  FlatMeasure project(const Mat& q) const;

 private:
  Form form_ = Form::Atoms;
  geom::Flat carrier_ = geom::Flat::point(Vec::Zero(1));
  Mat coords_;
  Vec weights_;
  double sigma_ = 0.0;
  int dropped_ = 0;
  Vec center_;
  double radius_ = 0.0;
  int cap_dim_ = 0;
  HalfspaceFn fn_;
};

/// Measure induced by `a` on `flat`. Throws DimensionMismatch.
FlatMeasure assign(const MassAssignment& a, const geom::Flat& flat);

/// Closed half-flat mass; throws CarrierMismatch when h lives on another flat.
double halfspace_mass(const FlatMeasure& m, const geom::HalfFlat& h);

/// Volume of {x in k-ball of `radius` : x_1 >= signed_height}; heights outside
/// [-radius, radius] are clamped.
double ball_cap_volume(int k, double signed_height, double radius);
double ball_volume(int k, double radius);

/// Midpoint of the closed interval of offsets c for which {<y, direction> = c}
/// bisects m (both closed sides hold at least half). Exactly antisymmetric in
/// the direction. Throws ZeroMass / UnsupportedKind (custom).
double median_offset(const FlatMeasure& m, const Vec& direction);

/// Midpoint-of-interval median of weighted scalar values (same rule as
/// median_offset). Throws ZeroMass when the total weight is not positive.
double weighted_median(std::span<const double> values, std::span<const double> weights);

/// Standard normal upper tail P(Z >= z).
double gaussian_tail(double z);

}  // namespace masspart::masses

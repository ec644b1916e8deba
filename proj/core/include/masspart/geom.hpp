#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "masspart/error.hpp"

namespace masspart {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

namespace tol {
inline constexpr double orth = 1e-10;
inline constexpr double geo = 1e-9;
inline constexpr double rank = 1e-8;
}  // namespace tol

}  // namespace masspart

namespace masspart::geom {

/// An ordered orthonormal m-frame in R^d, stored as the columns of a d x m matrix.
class Frame {
 public:
  /// Throws InvalidArgument unless the columns are orthonormal within tol::orth.
  explicit Frame(Mat vectors);

  static Frame standard(int ambient_dim, int size);

  int ambient_dim() const { return static_cast<int>(vectors_.rows()); }
  int size() const { return static_cast<int>(vectors_.cols()); }
  const Mat& vectors() const { return vectors_; }
  Vec vector(int i) const { return vectors_.col(i); }

  /// Multiplies column i by signs[i]; signs must be +-1.
  Frame with_signs(std::span<const int> signs) const;

  /// Representative of the sign orbit: the largest-magnitude coordinate of each
  /// vector (first one on ties) is made positive.
  Frame canonical_signs() const;

 private:
  Mat vectors_;
};

/// Stabilized Gram-Schmidt (two projection passes, fixed order).
/// Throws RankDeficient when the smallest singular value is below tol::rank.
Frame orthonormalize(const Mat& columns);
Frame orthonormalize(std::span<const Vec> vectors);

/// Index of the largest-magnitude entry (first on ties). Used to fix signs.
Eigen::Index sign_pivot(const Vec& v);

/// Affine subspace base + span(basis). The base is kept at the point of the
/// flat nearest the origin and the basis columns are orthonormal.
class Flat {
 public:
  Flat(const Vec& base, Mat basis);

  static Flat whole_space(int d);
  static Flat point(const Vec& p);
  /// Flat through `point` spanned by arbitrary independent directions.
  static Flat through(const Vec& point, const Mat& directions);

  int ambient_dim() const { return static_cast<int>(base_.size()); }
  int dim() const { return static_cast<int>(basis_.cols()); }
  const Vec& base() const { return base_; }
  const Mat& basis() const { return basis_; }

  Vec coordinates(const Vec& x) const { return basis_.transpose() * (x - base_); }
  Vec point_at(const Vec& coords) const { return base_ + basis_ * coords; }
  Vec nearest(const Vec& x) const { return point_at(coordinates(x)); }
  double distance(const Vec& x) const { return (x - nearest(x)).norm(); }
  /// Component of `direction` inside the flat's direction space.
  Vec project_direction(const Vec& direction) const {
    return basis_ * (basis_.transpose() * direction);
  }

  bool contains(const Vec& x, double tolerance = tol::geo) const;
  bool contains(const Flat& other, double tolerance = tol::geo) const;

 private:
  Vec base_;
  Mat basis_;
};

/// Closed half of `carrier` on the `outward` side of `boundary`.
struct HalfFlat {
  Flat carrier;
  Flat boundary;
  Vec outward;  // ambient unit vector, inside the carrier, orthogonal to boundary

  /// Throws MalformedSolution when the invariants do not hold.
  void validate() const;

  /// Outward normal in carrier coordinates.
  Vec normal_in_carrier() const { return carrier.basis().transpose() * outward; }
  /// Offset h such that the half-flat is {c : <c, u> >= h} in carrier coordinates.
  double offset_in_carrier() const {
    return normal_in_carrier().dot(carrier.coordinates(boundary.base()));
  }
  HalfFlat opposite() const { return HalfFlat{carrier, boundary, -outward}; }
};

struct SubFlat {
  Flat child;
  HalfFlat plus;
  HalfFlat minus;
};

/// Hyperplane {x in parent : <coords(x), normal> = offset} of `parent` together
/// with its two closed half-flats; `plus` lies on the +normal side.
SubFlat sub_flat(const Flat& parent, const Vec& normal_in_parent, double offset);

/// True iff e_{d-k+1}, ..., e_d all lie in the direction space of `flat`
/// (relative residual below tol).
bool is_k_vertical(const Flat& flat, int k, double tolerance = 1e-9);

/// Coordinates of the point of `flat` nearest to x.
Vec project_to_flat(const Flat& flat, const Vec& x);

/// One level of a flag: the flat and the unit normal of the cut inside its parent.
struct FlagLevel {
  Flat flat;
  Vec cut_normal;  // ambient unit vector
};

/// Nested flats S_{d-1} (front) down to S_{k-1} (back).
class Flag {
 public:
  Flag() = default;
  /// Throws MalformedSolution if nesting or dimensions are wrong.
  explicit Flag(std::vector<FlagLevel> levels);

  const std::vector<FlagLevel>& levels() const { return levels_; }
  std::size_t size() const { return levels_.size(); }
  bool empty() const { return levels_.empty(); }
  /// Level with intrinsic dimension `dim`.
  const FlagLevel& at_dim(int dim) const;
  /// The parent of the flat with dimension `dim` (R^d for the top level).
  Flat parent_of(int dim) const;
  /// The closed half-flat of the parent on the +cut_normal side.
  HalfFlat plus_side(int dim) const;
  int ambient_dim() const;

 private:
  std::vector<FlagLevel> levels_;
};

}  // namespace masspart::geom

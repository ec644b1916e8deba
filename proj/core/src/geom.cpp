#include "masspart/geom.hpp"

#include <cmath>
#include <sstream>

namespace masspart::geom {

namespace {

bool columns_orthonormal(const Mat& m, double tolerance) {
  if (m.cols() == 0) return true;
  const Mat gram = m.transpose() * m;
  return (gram - Mat::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff() <= tolerance;
}

// Basis of the orthogonal complement of the unit vector n inside R^k.
Mat complement_basis(const Vec& n) {
  const auto k = n.size();
  if (k == 1) return Mat(1, 0);
  Eigen::HouseholderQR<Mat> qr{Mat(n)};
  const Mat q = qr.householderQ();
  return q.rightCols(k - 1);
}

}  // namespace

Frame::Frame(Mat vectors) : vectors_(std::move(vectors)) {
  if (vectors_.cols() > vectors_.rows()) {
    throw Error(ErrorCode::InvalidArgument, "frame has more vectors than the ambient dimension");
  }
  if (!columns_orthonormal(vectors_, tol::orth)) {
    throw Error(ErrorCode::InvalidArgument, "frame vectors are not orthonormal");
  }
}

Frame Frame::standard(int ambient_dim, int size) {
  return Frame(Mat::Identity(ambient_dim, size));
}

Frame Frame::with_signs(std::span<const int> signs) const {
  if (static_cast<int>(signs.size()) != size()) {
    throw Error(ErrorCode::DimensionMismatch, "sign vector length differs from frame size");
  }
  Mat v = vectors_;
  for (int i = 0; i < size(); ++i) {
    if (signs[i] != 1 && signs[i] != -1) throw Error(ErrorCode::InvalidArgument, "signs must be +-1");
    if (signs[i] < 0) v.col(i) = -v.col(i);
  }
  return Frame(std::move(v));
}

Frame Frame::canonical_signs() const {
  Mat v = vectors_;
  for (int i = 0; i < size(); ++i) {
    const Vec col = v.col(i);
    if (col(sign_pivot(col)) < 0) v.col(i) = -col;
  }
  return Frame(std::move(v));
}

Eigen::Index sign_pivot(const Vec& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v(i)) > std::abs(v(best))) best = i;
  }
  return best;
}

Frame orthonormalize(const Mat& columns) {
  if (columns.cols() == 0) return Frame(Mat(columns.rows(), 0));
  if (columns.cols() > columns.rows()) {
    throw Error(ErrorCode::RankDeficient, "more vectors than the ambient dimension");
  }
  Eigen::JacobiSVD<Mat> svd(columns);
  if (svd.singularValues().minCoeff() <= tol::rank) {
    throw Error(ErrorCode::RankDeficient, "input vectors are linearly dependent");
  }
  Mat q = columns;
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    Vec col = q.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index i = 0; i < j; ++i) col -= q.col(i).dot(col) * q.col(i);
    }
    q.col(j) = col / col.norm();
  }
  return Frame(std::move(q));
}

Frame orthonormalize(std::span<const Vec> vectors) {
  if (vectors.empty()) throw Error(ErrorCode::InvalidArgument, "no vectors to orthonormalize");
  Mat m(vectors.front().size(), static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    if (vectors[j].size() != m.rows()) throw Error(ErrorCode::DimensionMismatch, "vectors differ in length");
    m.col(static_cast<Eigen::Index>(j)) = vectors[j];
  }
  return orthonormalize(m);
}

Flat::Flat(const Vec& base, Mat basis) : basis_(std::move(basis)) {
  if (basis_.rows() != base.size()) throw Error(ErrorCode::DimensionMismatch, "basis rows differ from base length");
  if (!columns_orthonormal(basis_, tol::orth * std::max<Eigen::Index>(1, basis_.cols()))) {
    throw Error(ErrorCode::InvalidArgument, "flat basis is not orthonormal");
  }
  base_ = base - basis_ * (basis_.transpose() * base);
}

Flat Flat::whole_space(int d) { return Flat(Vec::Zero(d), Mat::Identity(d, d)); }

Flat Flat::point(const Vec& p) { return Flat(p, Mat(p.size(), 0)); }

Flat Flat::through(const Vec& point, const Mat& directions) {
  if (directions.cols() == 0) return Flat::point(point);
  return Flat(point, orthonormalize(directions).vectors());
}

bool Flat::contains(const Vec& x, double tolerance) const {
  return x.size() == base_.size() && distance(x) <= tolerance;
}

bool Flat::contains(const Flat& other, double tolerance) const {
  if (other.ambient_dim() != ambient_dim() || other.dim() > dim()) return false;
  if (!contains(other.base(), tolerance)) return false;
  for (Eigen::Index j = 0; j < other.basis().cols(); ++j) {
    const Vec b = other.basis().col(j);
    if ((b - project_direction(b)).norm() > tolerance) return false;
  }
  return true;
}

void HalfFlat::validate() const {
  if (boundary.dim() + 1 != carrier.dim()) {
    throw Error(ErrorCode::MalformedSolution, "half-flat boundary must have codimension one");
  }
  if (!carrier.contains(boundary)) throw Error(ErrorCode::MalformedSolution, "boundary not inside carrier");
  if (std::abs(outward.norm() - 1.0) > tol::geo) throw Error(ErrorCode::MalformedSolution, "outward not unit");
  if ((outward - carrier.project_direction(outward)).norm() > tol::geo) {
    throw Error(ErrorCode::MalformedSolution, "outward leaves the carrier");
  }
  if (boundary.dim() > 0 && (boundary.basis().transpose() * outward).cwiseAbs().maxCoeff() > tol::geo) {
    throw Error(ErrorCode::MalformedSolution, "outward not orthogonal to boundary");
  }
}

SubFlat sub_flat(const Flat& parent, const Vec& normal_in_parent, double offset) {
  if (parent.dim() < 1) throw Error(ErrorCode::InvalidArgument, "cannot cut a point");
  if (normal_in_parent.size() != parent.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "normal must be given in parent coordinates");
  }
  if (std::abs(normal_in_parent.norm() - 1.0) > tol::geo) {
    throw Error(ErrorCode::InvalidArgument, "cut normal must be a unit vector");
  }
  // Work with the sign-canonical normal so that n and -n produce the same child.
  const double s = normal_in_parent(sign_pivot(normal_in_parent)) < 0 ? -1.0 : 1.0;
  const Vec n = s * normal_in_parent;
  const Vec ambient_n = parent.basis() * n;
  const Vec base = parent.base() + (s * offset) * ambient_n;
  Flat child(base, parent.basis() * complement_basis(n));
  const Vec plus_dir = s * ambient_n;
  HalfFlat plus{parent, child, plus_dir};
  HalfFlat minus{parent, child, -plus_dir};
  return SubFlat{std::move(child), std::move(plus), std::move(minus)};
}

bool is_k_vertical(const Flat& flat, int k, double tolerance) {
  const int d = flat.ambient_dim();
  if (k < 0 || k > flat.dim()) throw Error(ErrorCode::InvalidArgument, "k must lie in [0, dim(flat)]");
  for (int j = d - k; j < d; ++j) {
    const Vec e = Vec::Unit(d, j);
    if ((e - flat.project_direction(e)).norm() >= tolerance) return false;
  }
  return true;
}

Vec project_to_flat(const Flat& flat, const Vec& x) {
  if (x.size() != flat.ambient_dim()) throw Error(ErrorCode::DimensionMismatch, "point dimension");
  return flat.coordinates(x);
}

Flag::Flag(std::vector<FlagLevel> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) return;
  const int d = levels_.front().flat.ambient_dim();
  Flat parent = Flat::whole_space(d);
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    const auto& lvl = levels_[i];
    std::ostringstream where;
    where << "flag level " << i;
    if (lvl.flat.ambient_dim() != d || lvl.flat.dim() != d - 1 - static_cast<int>(i)) {
      throw Error(ErrorCode::MalformedSolution, where.str() + ": wrong dimension");
    }
    HalfFlat{parent, lvl.flat, lvl.cut_normal}.validate();
    parent = lvl.flat;
  }
}

int Flag::ambient_dim() const {
  if (levels_.empty()) throw Error(ErrorCode::MalformedSolution, "empty flag");
  return levels_.front().flat.ambient_dim();
}

const FlagLevel& Flag::at_dim(int dim) const {
  const int idx = ambient_dim() - 1 - dim;
  if (idx < 0 || idx >= static_cast<int>(levels_.size())) {
    throw Error(ErrorCode::InvalidArgument, "flag has no level of that dimension");
  }
  return levels_[static_cast<std::size_t>(idx)];
}

Flat Flag::parent_of(int dim) const {
  const int d = ambient_dim();
  if (dim == d - 1) return Flat::whole_space(d);
  return at_dim(dim + 1).flat;
}

HalfFlat Flag::plus_side(int dim) const {
  const auto& lvl = at_dim(dim);
  return HalfFlat{parent_of(dim), lvl.flat, lvl.cut_normal};
}

}  // namespace masspart::geom

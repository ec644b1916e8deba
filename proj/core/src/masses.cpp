#include "masspart/masses.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

namespace masspart::masses {

std::string_view to_string(Kind kind) {
  switch (kind) {
    case Kind::ProjectedCloud: return "ProjectedCloud";
    case Kind::ProjectedBall: return "ProjectedBall";
    case Kind::BallSection: return "BallSection";
    case Kind::LineFamily: return "LineFamily";
    case Kind::HyperplaneFamily: return "HyperplaneFamily";
    case Kind::CustomHalfspaceFn: return "CustomHalfspaceFn";
  }
  return "Unknown";
}

namespace {

void require_weights(const Vec& w) {
  if (w.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty weight list");
  if ((w.array() < 0.0).any()) throw Error(ErrorCode::InvalidArgument, "negative weight");
  if (w.sum() <= 0.0) throw Error(ErrorCode::ZeroMass, "total weight must be positive");
}

void require_unit(const Vec& v, const char* what) {
  if (std::abs(v.norm() - 1.0) > tol::geo) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be unit length");
}

// Unit normal of a hyperplane flat.
Vec hyperplane_normal(const geom::Flat& flat) {
  const int d = flat.ambient_dim();
  Eigen::HouseholderQR<Mat> qr(flat.basis());
  const Mat q = qr.householderQ();
  return q.col(d - 1);
}

// Largest c with sum_{p_i >= c} w_i >= target, for sorted-descending scan.
double discrete_upper_quantile(std::span<const double> proj, std::span<const double> w, double t) {
  std::vector<std::size_t> order(proj.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return proj[a] > proj[b]; });
  double total = 0.0;
  for (double x : w) total += x;
  if (total <= 0.0) throw Error(ErrorCode::ZeroMass, "measure has no mass");
  const double target = t * total - 1e-12 * total;
  double cum = 0.0;
  for (std::size_t idx : order) {
    cum += w[idx];
    if (w[idx] > 0.0 && cum >= target) return proj[idx];
  }
  return proj[order.back()];
}

}  // namespace

double gaussian_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double ball_volume(int k, double radius) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "ball dimension must be non-negative");
  const double half_k = 0.5 * k;
  return std::pow(std::numbers::pi, half_k) / boost::math::tgamma(half_k + 1.0) * std::pow(radius, k);
}

double ball_cap_volume(int k, double signed_height, double radius) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "cap dimension must be at least 1");
  if (radius < 0.0) throw Error(ErrorCode::InvalidArgument, "negative radius");
  if (radius == 0.0) return 0.0;
  const double full = ball_volume(k, radius);
  const double h = std::clamp(signed_height, -radius, radius);
  const double a = 0.5 * (k + 1);
  auto upper_cap = [&](double height) {  // height >= 0
    const double rel = height / radius;
    const double x = std::max(0.0, 1.0 - rel * rel);
    return 0.5 * full * boost::math::ibeta(a, 0.5, x);
  };
  if (h >= 0.0) return upper_cap(h);
  return full - upper_cap(-h);
}

double weighted_median(std::span<const double> values, std::span<const double> weights) {
  if (values.size() != weights.size() || values.empty()) {
    throw Error(ErrorCode::ZeroMass, "weighted median of an empty list");
  }
  std::vector<double> neg(values.size());
  std::transform(values.begin(), values.end(), neg.begin(), [](double v) { return -v; });
  const double hi = discrete_upper_quantile(values, weights, 0.5);
  const double lo = discrete_upper_quantile(neg, weights, 0.5);
  return 0.5 * (hi - lo);
}

// ---------------------------------------------------------------------------
// MassAssignment

MassAssignment MassAssignment::projected_cloud(int dim, Mat points, Vec weights) {
  if (points.cols() != weights.size()) throw Error(ErrorCode::DimensionMismatch, "one weight per point");
  if (dim < 0 || dim > points.rows()) throw Error(ErrorCode::InvalidArgument, "assignment dimension out of range");
  require_weights(weights);
  MassAssignment a;
  a.kind_ = Kind::ProjectedCloud;
  a.dim_ = dim;
  a.ambient_dim_ = static_cast<int>(points.rows());
  a.points_ = std::move(points);
  a.weights_ = std::move(weights);
  return a;
}

MassAssignment MassAssignment::projected_ball(int dim, Vec center, double radius) {
  if (radius <= 0.0) throw Error(ErrorCode::InvalidArgument, "ball radius must be positive");
  if (dim < 1 || dim > center.size()) throw Error(ErrorCode::InvalidArgument, "assignment dimension out of range");
  MassAssignment a;
  a.kind_ = Kind::ProjectedBall;
  a.dim_ = dim;
  a.ambient_dim_ = static_cast<int>(center.size());
  a.center_ = std::move(center);
  a.radius_ = radius;
  return a;
}

MassAssignment MassAssignment::ball_section(int dim, Vec center, double radius) {
  MassAssignment a = projected_ball(dim, std::move(center), radius);
  a.kind_ = Kind::BallSection;
  return a;
}

MassAssignment MassAssignment::line_family(std::vector<Line> lines) {
  if (lines.empty()) throw Error(ErrorCode::InvalidArgument, "empty line family");
  const auto d = lines.front().point.size();
  if (d < 2) throw Error(ErrorCode::InvalidArgument, "line families need d >= 2");
  double total = 0.0;
  for (const auto& l : lines) {
    if (l.point.size() != d || l.direction.size() != d) throw Error(ErrorCode::DimensionMismatch, "line dimension");
    require_unit(l.direction, "line direction");
    if (l.weight < 0.0) throw Error(ErrorCode::InvalidArgument, "negative weight");
    total += l.weight;
  }
  if (total <= 0.0) throw Error(ErrorCode::ZeroMass, "total weight must be positive");
  MassAssignment a;
  a.kind_ = Kind::LineFamily;
  a.ambient_dim_ = static_cast<int>(d);
  a.dim_ = a.ambient_dim_ - 1;
  a.lines_ = std::move(lines);
  return a;
}

MassAssignment MassAssignment::hyperplane_family(std::vector<Hyperplane> hyperplanes) {
  if (hyperplanes.empty()) throw Error(ErrorCode::InvalidArgument, "empty hyperplane family");
  const auto d = hyperplanes.front().normal.size();
  double total = 0.0;
  for (const auto& h : hyperplanes) {
    if (h.normal.size() != d) throw Error(ErrorCode::DimensionMismatch, "hyperplane dimension");
    require_unit(h.normal, "hyperplane normal");
    if (h.weight < 0.0) throw Error(ErrorCode::InvalidArgument, "negative weight");
    total += h.weight;
  }
  if (total <= 0.0) throw Error(ErrorCode::ZeroMass, "total weight must be positive");
  MassAssignment a;
  a.kind_ = Kind::HyperplaneFamily;
  a.ambient_dim_ = static_cast<int>(d);
  a.dim_ = 1;
  a.hyperplanes_ = std::move(hyperplanes);
  return a;
}

MassAssignment MassAssignment::custom(int dim, int ambient_dim, HalfspaceFn fn, std::string label) {
  if (dim < 1 || dim > ambient_dim) throw Error(ErrorCode::InvalidArgument, "assignment dimension out of range");
  MassAssignment a;
  a.kind_ = Kind::CustomHalfspaceFn;
  a.dim_ = dim;
  a.ambient_dim_ = ambient_dim;
  a.fn_ = std::move(fn);
  a.label_ = std::move(label);
  return a;
}

MassAssignment MassAssignment::zero(int dim, int ambient_dim) {
  return custom(dim, ambient_dim, [](const geom::HalfFlat&) { return 0.0; }, "zero");
}

double MassAssignment::data_diameter() const {
  std::vector<Vec> anchors;
  switch (kind_) {
    case Kind::ProjectedCloud:
      for (Eigen::Index j = 0; j < points_.cols(); ++j) anchors.emplace_back(points_.col(j));
      break;
    case Kind::ProjectedBall:
    case Kind::BallSection:
      return 2.0 * radius_;
    case Kind::LineFamily:
      for (const auto& l : lines_) anchors.push_back(l.point);
      break;
    case Kind::HyperplaneFamily: {
      double lo = hyperplanes_.front().offset, hi = lo;
      for (const auto& h : hyperplanes_) {
        lo = std::min(lo, h.offset);
        hi = std::max(hi, h.offset);
      }
      return hi - lo;
    }
    case Kind::CustomHalfspaceFn:
      return 0.0;
  }
  double best = 0.0;
  for (std::size_t i = 0; i < anchors.size(); ++i)
    for (std::size_t j = i + 1; j < anchors.size(); ++j) best = std::max(best, (anchors[i] - anchors[j]).norm());
  return best;
}

MassAssignment mollify(const MassAssignment& a, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "mollification scale must be positive");
  if (!a.is_discrete()) {
    throw Error(ErrorCode::UnsupportedKind, std::string("cannot mollify ") + std::string(to_string(a.kind())));
  }
  MassAssignment out = a;
  out.sigma_ = sigma;
  return out;
}

// ---------------------------------------------------------------------------
// FlatMeasure

FlatMeasure FlatMeasure::atoms(geom::Flat carrier, Mat coords, Vec weights, double sigma, int dropped) {
  if (coords.rows() != carrier.dim() || coords.cols() != weights.size()) {
    throw Error(ErrorCode::DimensionMismatch, "atom coordinates do not match the carrier");
  }
  FlatMeasure m;
  m.form_ = Form::Atoms;
  m.carrier_ = std::move(carrier);
  m.coords_ = std::move(coords);
  m.weights_ = std::move(weights);
  m.sigma_ = sigma;
  m.dropped_ = dropped;
  return m;
}

FlatMeasure FlatMeasure::ball(geom::Flat carrier, Vec center, double radius, int cap_dim) {
  if (center.size() != carrier.dim()) throw Error(ErrorCode::DimensionMismatch, "ball center dimension");
  FlatMeasure m;
  m.form_ = Form::Ball;
  m.carrier_ = std::move(carrier);
  m.center_ = std::move(center);
  m.radius_ = std::max(0.0, radius);
  m.cap_dim_ = cap_dim;
  return m;
}

FlatMeasure FlatMeasure::custom(geom::Flat carrier, HalfspaceFn fn) {
  FlatMeasure m;
  m.form_ = Form::Custom;
  m.carrier_ = std::move(carrier);
  m.fn_ = std::move(fn);
  return m;
}

double FlatMeasure::total_mass() const {
  switch (form_) {
    case Form::Atoms: return weights_.sum();
    case Form::Ball: return radius_ > 0.0 ? ball_volume(cap_dim_, radius_) : 0.0;
    case Form::Custom: break;
  }
  throw Error(ErrorCode::UnsupportedKind, "custom functionals have no total mass");
}

double FlatMeasure::mass_above(const Vec& u, double c) const {
  switch (form_) {
    case Form::Atoms: {
      double sum = 0.0;
      for (Eigen::Index j = 0; j < coords_.cols(); ++j) {
        const double s = coords_.col(j).dot(u) - c;
        if (sigma_ > 0.0) {
          sum += weights_(j) * gaussian_tail(-s / sigma_);
        } else if (s >= -tol::geo) {
          sum += weights_(j);
        }
      }
      return sum;
    }
    case Form::Ball:
      if (radius_ <= 0.0) return 0.0;
      return ball_cap_volume(cap_dim_, c - center_.dot(u), radius_);
    case Form::Custom: break;
  }
  throw Error(ErrorCode::UnsupportedKind, "use halfspace_mass for custom functionals");
}

double FlatMeasure::mass_on_boundary(const Vec& u, double c) const {
  if (form_ != Form::Atoms || sigma_ > 0.0) return 0.0;
  double sum = 0.0;
  for (Eigen::Index j = 0; j < coords_.cols(); ++j) {
    if (std::abs(coords_.col(j).dot(u) - c) <= tol::geo) sum += weights_(j);
  }
  return sum;
}

double FlatMeasure::quantile(const Vec& u, double t) const {
  if (!(t > 0.0 && t <= 1.0)) throw Error(ErrorCode::InvalidArgument, "quantile level must lie in (0, 1]");
  const double total = total_mass();
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroMass, "measure has no mass on this flat");
  switch (form_) {
    case Form::Atoms: {
      const Vec proj = coords_.transpose() * u;
      if (sigma_ <= 0.0) {
        return discrete_upper_quantile({proj.data(), static_cast<std::size_t>(proj.size())},
                                       {weights_.data(), static_cast<std::size_t>(weights_.size())}, t);
      }
      const double target = t * total;
      double lo = proj.minCoeff() - 40.0 * sigma_;
      double hi = proj.maxCoeff() + 40.0 * sigma_;
      auto f = [&](double c) { return mass_above(u, c) - target; };
      double flo = f(lo), fhi = f(hi);
      if (flo <= 0.0) return lo;
      if (fhi >= 0.0) return hi;
      boost::math::tools::eps_tolerance<double> tolerance(std::numeric_limits<double>::digits - 3);
      std::uintmax_t iters = 200;
      const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tolerance, iters);
      return 0.5 * (a + b);
    }
    case Form::Ball: {
      // Solve cap(h) = t * total for the signed height h.
      const double half_a = 0.5 * (cap_dim_ + 1);
      auto height_for = [&](double p) {  // p <= 1/2, returns h >= 0
        const double x = boost::math::ibeta_inv(half_a, 0.5, std::min(1.0, 2.0 * p));
        return radius_ * std::sqrt(std::max(0.0, 1.0 - x));
      };
      const double h = t <= 0.5 ? height_for(t) : -height_for(1.0 - t);
      return center_.dot(u) + h;
    }
    case Form::Custom: break;
  }
  throw Error(ErrorCode::UnsupportedKind, "custom functionals have no quantiles");
}

FlatMeasure FlatMeasure::project(const Mat& q) const {
  if (q.rows() != dim()) throw Error(ErrorCode::DimensionMismatch, "projection basis must use carrier coordinates");
  geom::Flat sub(carrier_.base(), carrier_.basis() * q);
  switch (form_) {
    case Form::Atoms: return atoms(std::move(sub), q.transpose() * coords_, weights_, sigma_, dropped_);
    case Form::Ball: return ball(std::move(sub), q.transpose() * center_, radius_, cap_dim_);
    case Form::Custom: break;
  }
  throw Error(ErrorCode::UnsupportedKind, "custom functionals cannot be projected");
}

// ---------------------------------------------------------------------------

FlatMeasure assign(const MassAssignment& a, const geom::Flat& flat) {
  if (flat.dim() != a.dim() || flat.ambient_dim() != a.ambient_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "flat dimension does not match the assignment");
  }
  const Mat& basis = flat.basis();
  switch (a.kind()) {
    case Kind::ProjectedCloud:
      return FlatMeasure::atoms(flat, basis.transpose() * a.points(), a.weights(), a.mollify_sigma());
    case Kind::ProjectedBall:
      return FlatMeasure::ball(flat, basis.transpose() * a.center(), a.radius(), a.ambient_dim());
    case Kind::BallSection: {
      const double dist = flat.distance(a.center());
      const double r2 = a.radius() * a.radius() - dist * dist;
      return FlatMeasure::ball(flat, basis.transpose() * a.center(), r2 > 0.0 ? std::sqrt(r2) : 0.0, flat.dim());
    }
    case Kind::LineFamily: {
      const Vec normal = hyperplane_normal(flat);
      std::vector<Vec> pts;
      std::vector<double> w;
      int dropped = 0;
      for (const auto& l : a.lines()) {
        const double denom = l.direction.dot(normal);
        if (std::abs(denom) <= tol::rank) {
          ++dropped;
          continue;
        }
        const double t = (flat.base() - l.point).dot(normal) / denom;
        pts.push_back(basis.transpose() * (l.point + t * l.direction));
        w.push_back(l.weight);
      }
      Mat coords(flat.dim(), static_cast<Eigen::Index>(pts.size()));
      for (std::size_t j = 0; j < pts.size(); ++j) coords.col(static_cast<Eigen::Index>(j)) = pts[j];
      return FlatMeasure::atoms(flat, std::move(coords), Eigen::Map<Vec>(w.data(), static_cast<Eigen::Index>(w.size())),
                                a.mollify_sigma(), dropped);
    }
    case Kind::HyperplaneFamily: {
      const Vec dir = basis.col(0);
      std::vector<double> t_vals, w;
      int dropped = 0;
      for (const auto& h : a.hyperplanes()) {
        const double denom = h.normal.dot(dir);
        if (std::abs(denom) <= tol::rank) {
          ++dropped;
          continue;
        }
        const double t = (h.offset - h.normal.dot(flat.base())) / denom;
        t_vals.push_back(t);
        w.push_back(h.weight);
      }
      Mat coords(1, static_cast<Eigen::Index>(t_vals.size()));
      for (std::size_t j = 0; j < t_vals.size(); ++j) coords(0, static_cast<Eigen::Index>(j)) = t_vals[j];
      return FlatMeasure::atoms(flat, std::move(coords), Eigen::Map<Vec>(w.data(), static_cast<Eigen::Index>(w.size())),
                                a.mollify_sigma(), dropped);
    }
    case Kind::CustomHalfspaceFn:
      return FlatMeasure::custom(flat, a.evaluator());
  }
  throw Error(ErrorCode::UnsupportedKind, "unknown assignment kind");
}

double halfspace_mass(const FlatMeasure& m, const geom::HalfFlat& h) {
  const auto& carrier = m.carrier();
  if (h.carrier.dim() != carrier.dim() || !carrier.contains(h.carrier, 1e-7)) {
    throw Error(ErrorCode::CarrierMismatch, "half-flat does not live on the measure's carrier");
  }
  if (m.form() == FlatMeasure::Form::Custom) return m.evaluator()(h);
  const Vec u = carrier.basis().transpose() * h.outward;
  const double c = u.dot(carrier.coordinates(h.boundary.base()));
  return m.mass_above(u, c);
}

double median_offset(const FlatMeasure& m, const Vec& direction) {
  if (m.form() == FlatMeasure::Form::Custom) {
    throw Error(ErrorCode::UnsupportedKind, "custom functionals have no median");
  }
  if (direction.size() != m.dim()) throw Error(ErrorCode::DimensionMismatch, "direction must use carrier coordinates");
  if (!(m.total_mass() > 0.0)) throw Error(ErrorCode::ZeroMass, "median of an empty measure");
  if (m.form() == FlatMeasure::Form::Ball) return m.ball_center().dot(direction);
  // Bisecting offsets form [-q(-u), q(u)]; the midpoint is exactly odd in u.
  return 0.5 * (m.quantile(direction, 0.5) - m.quantile(-direction, 0.5));
}

}  // namespace masspart::masses

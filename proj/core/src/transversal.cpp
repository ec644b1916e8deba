#include "masspart/transversal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "masspart/flagsolve.hpp"
#include "masspart/stiefel.hpp"

namespace masspart::transversal {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr int dense_directions = 720;
// Critical angles closer than this are one boundary line.
constexpr double angle_merge = 1e-10;

Vec direction(double theta) { return Vec{{std::cos(theta), std::sin(theta)}}; }

double wrap(double theta) {
  theta = std::fmod(theta, two_pi);
  return theta < 0.0 ? theta + two_pi : theta;
}

void require_mass(const FlatMeasure& m) {
  if (!(m.total_mass() > 0.0)) throw Error(ErrorCode::ZeroMass, "measure has no mass on this flat");
}

void require_low_dim(const FlatMeasure& m) {
  if (m.dim() > 2) throw Error(ErrorCode::UnsupportedDimension, "depth is only available in dimension <= 2");
  if (m.form() == FlatMeasure::Form::Custom) throw Error(ErrorCode::UnsupportedKind, "custom functionals have no depth");
}

bool exact_atoms(const FlatMeasure& m) { return m.form() == FlatMeasure::Form::Atoms && !m.mollified(); }

// Atoms this close to the query point lie in every half-plane through it.
double coincidence_eps(const Mat& coords, const Vec& x) {
  return 1e-12 * std::max({1.0, x.cwiseAbs().maxCoeff(), coords.cwiseAbs().maxCoeff()});
}

// Sorted normal angles at which a half-plane through x has an atom on its boundary.
std::vector<double> critical_angles_at(const Mat& coords, const Vec& x) {
  std::vector<double> out;
  const double eps = coincidence_eps(coords, x);
  for (Eigen::Index j = 0; j < coords.cols(); ++j) {
    const Vec w = coords.col(j) - x;
    if (w.norm() <= eps) continue;
    const double phi = std::atan2(w(1), w(0));
    out.push_back(wrap(phi + 0.5 * std::numbers::pi));
    out.push_back(wrap(phi - 0.5 * std::numbers::pi));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return b - a <= angle_merge; }), out.end());
  if (out.size() > 1 && out.front() + two_pi - out.back() <= angle_merge) out.pop_back();
  return out;
}

// Arc midpoints of a sorted circular angle list, arcs longer than max_arc split.
std::vector<std::pair<double, double>> arcs(const std::vector<double>& angles, double max_arc) {
  std::vector<std::pair<double, double>> out;
  const std::size_t n = angles.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double a = angles[i];
    const double b = i + 1 < n ? angles[i + 1] : angles[0] + two_pi;
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / max_arc)));
    for (int s = 0; s < pieces; ++s) out.emplace_back(a + (b - a) * s / pieces, a + (b - a) * (s + 1) / pieces);
  }
  return out;
}

double atoms_depth_2d(const FlatMeasure& m, const Vec& x) {
  const Mat& c = m.atom_coords();
  const Vec& w = m.atom_weights();
  const double total = m.total_mass();
  const auto angles = critical_angles_at(c, x);
  if (angles.empty()) return 1.0;
  const double eps = coincidence_eps(c, x);
  double best = total;
  for (const auto& [a, b] : arcs(angles, 4.0)) {
    const Vec u = direction(0.5 * (a + b));
    double mass = 0.0;
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      const Vec off = c.col(j) - x;
      if (off.norm() <= eps || off.dot(u) >= 0.0) mass += w(j);
    }
    best = std::min(best, mass);
  }
  return best / total;
}

double smooth_depth_2d(const FlatMeasure& m, const Vec& x) {
  const double total = m.total_mass();
  auto frac = [&](double theta) {
    const Vec u = direction(theta);
    return m.mass_above(u, u.dot(x)) / total;
  };
  if (m.form() == FlatMeasure::Form::Ball) {
    const Vec off = x - m.ball_center();
    if (off.norm() == 0.0) return 0.5;
    return frac(std::atan2(off(1), off(0)));
  }
  const double step = two_pi / dense_directions;
  int arg = 0;
  double best = frac(0.0);
  for (int i = 1; i < dense_directions; ++i) {
    const double v = frac(i * step);
    if (v < best) {
      best = v;
      arg = i;
    }
  }
  const auto r = boost::math::tools::brent_find_minima(frac, (arg - 1) * step, (arg + 1) * step, 40);
  return std::min(best, r.second);
}

// Sutherland-Hodgman clip of a counterclockwise polygon by <y, u> <= c.
std::vector<Vec> clip(const std::vector<Vec>& poly, const Vec& u, double c, double eps) {
  std::vector<Vec> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec& p = poly[i];
    const Vec& q = poly[(i + 1) % n];
    const double fp = p.dot(u) - c;
    const double fq = q.dot(u) - c;
    const bool in_p = fp <= eps;
    const bool in_q = fq <= eps;
    if (in_p) out.push_back(p);
    if (in_p != in_q && std::abs(fp - fq) > 0.0) {
      const double s = fp / (fp - fq);
      out.push_back(p + s * (q - p));
    }
  }
  return out;
}

std::vector<Vec> dedupe(const std::vector<Vec>& pts, double eps) {
  std::vector<Vec> out;
  for (const auto& p : pts) {
    if (out.empty() || (p - out.back()).norm() > eps) out.push_back(p);
  }
  while (out.size() > 1 && (out.front() - out.back()).norm() <= eps) out.pop_back();
  return out;
}

Region region_2d(const FlatMeasure& m, double t) {
  // Each constraint is <y, u> <= q(u, t).
  std::vector<std::pair<Vec, double>> cons;
  double scale = 1.0;
  if (exact_atoms(m)) {
    const Mat& c = m.atom_coords();
    std::vector<double> angles;
    for (Eigen::Index i = 0; i < c.cols(); ++i) {
      scale = std::max(scale, c.col(i).cwiseAbs().maxCoeff());
      for (Eigen::Index j = i + 1; j < c.cols(); ++j) {
        const Vec w = c.col(j) - c.col(i);
        if (w(0) == 0.0 && w(1) == 0.0) continue;
        const double phi = std::atan2(w(1), w(0));
        angles.push_back(wrap(phi + 0.5 * std::numbers::pi));
        angles.push_back(wrap(phi - 0.5 * std::numbers::pi));
      }
    }
    for (int s = 0; s < 4; ++s) angles.push_back(s * 0.5 * std::numbers::pi);
    std::sort(angles.begin(), angles.end());
    angles.erase(std::unique(angles.begin(), angles.end()), angles.end());
    for (const auto& [a, b] : arcs(angles, 0.25 * std::numbers::pi)) {
      const Vec um = direction(0.5 * (a + b));
      const double q = m.quantile(um, t);
      Eigen::Index star = 0;
      double gap = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < c.cols(); ++j) {
        const double g = std::abs(c.col(j).dot(um) - q);
        if (g < gap) {
          gap = g;
          star = j;
        }
      }
      for (double theta : {a, b}) {
        const Vec u = direction(theta);
        cons.emplace_back(u, c.col(star).dot(u));
      }
    }
  } else {
    if (m.form() == FlatMeasure::Form::Atoms) {
      scale = std::max(scale, m.atom_coords().cwiseAbs().maxCoeff());
    } else {
      scale = std::max(scale, m.ball_center().cwiseAbs().maxCoeff() + m.ball_radius());
    }
    for (int i = 0; i < dense_directions; ++i) {
      const Vec u = direction(two_pi * i / dense_directions);
      cons.emplace_back(u, m.quantile(u, t));
    }
  }
  const double eps = 1e-12 * scale;
  const double x_hi = m.quantile(Vec{{1.0, 0.0}}, t), x_lo = -m.quantile(Vec{{-1.0, 0.0}}, t);
  const double y_hi = m.quantile(Vec{{0.0, 1.0}}, t), y_lo = -m.quantile(Vec{{0.0, -1.0}}, t);
  if (x_lo > x_hi + eps || y_lo > y_hi + eps) throw Error(ErrorCode::EmptyRegion, "no point reaches this depth");
  std::vector<Vec> poly{Vec{{x_lo, y_lo}}, Vec{{x_hi, y_lo}}, Vec{{x_hi, y_hi}}, Vec{{x_lo, y_hi}}};
  for (const auto& [u, c] : cons) {
    poly = clip(poly, u, c, eps);
    if (poly.empty()) throw Error(ErrorCode::EmptyRegion, "no point reaches this depth");
  }
  return Region{2, dedupe(poly, eps)};
}

}  // namespace

double tukey_depth(const FlatMeasure& m, const Vec& x) {
  require_low_dim(m);
  require_mass(m);
  if (x.size() != m.dim()) throw Error(ErrorCode::DimensionMismatch, "point must use carrier coordinates");
  const double total = m.total_mass();
  switch (m.dim()) {
    case 0: return 1.0;
    case 1: {
      const Vec u = Vec::Ones(1);
      return std::min(m.mass_above(u, x(0)), m.mass_below(u, x(0))) / total;
    }
    default: return exact_atoms(m) ? atoms_depth_2d(m, x) : smooth_depth_2d(m, x);
  }
}

Region centerpoint_region(const FlatMeasure& m, double threshold) {
  require_low_dim(m);
  require_mass(m);
  if (!(threshold > 0.0 && threshold <= 1.0)) throw Error(ErrorCode::InvalidArgument, "threshold must lie in (0, 1]");
  switch (m.dim()) {
    case 0: return Region{0, {Vec::Zero(0)}};
    case 1: {
      const double hi = m.quantile(Vec::Ones(1), threshold);
      const double lo = -m.quantile(-Vec::Ones(1), threshold);
      if (lo > hi) {
        // Smooth measures whose mass is flat at the threshold: the two root finds
        // may cross. Accept the crossed interval if it reaches the depth up to rounding.
        const double mid = 0.5 * (lo + hi);
        const double slack = 1e-9 * m.total_mass();
        const Vec u = Vec::Ones(1);
        if (exact_atoms(m) || std::min(m.mass_above(u, mid), m.mass_below(u, mid)) < threshold * m.total_mass() - slack) {
          throw Error(ErrorCode::EmptyRegion, "no point reaches this depth");
        }
        return Region{1, {Vec::Constant(1, hi), Vec::Constant(1, lo)}};
      }
      return Region{1, {Vec::Constant(1, lo), Vec::Constant(1, hi)}};
    }
    default: return region_2d(m, threshold);
  }
}

Vec region_barycenter(const Region& r) {
  if (r.vertices.empty()) throw Error(ErrorCode::EmptyRegion, "empty region has no barycenter");
  if (r.dim == 0) return r.vertices.front();
  if (r.dim == 1) return Vec::Constant(1, 0.5 * (r.vertices[0](0) + r.vertices[1](0)));
  const auto& v = r.vertices;
  double scale = 1.0;
  for (const auto& p : v) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  const Vec o = v.front();
  double area = 0.0;
  Vec acc = Vec::Zero(2);
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    const Vec a = v[i] - o;
    const Vec b = v[i + 1] - o;
    const double cross = a(0) * b(1) - a(1) * b(0);
    area += cross;
    acc += cross * (a + b);
  }
  if (std::abs(area) > 1e-14 * scale * scale) return o + acc / (3.0 * area);
  Vec mean = Vec::Zero(2);
  for (const auto& p : v) mean += p;
  return mean / static_cast<double>(v.size());
}

// ---------------------------------------------------------------------------

void TransversalProblem::validate() const {
  if (!(0 <= lambda && lambda < k && k <= d)) throw Error(ErrorCode::InvalidArgument, "need 0 <= lambda < k <= d");
  if (k - lambda > 2) throw Error(ErrorCode::UnsupportedDimension, "only k - lambda <= 2 is supported");
  if (static_cast<int>(assignments.size()) != d - k + lambda + 1) {
    throw Error(ErrorCode::InvalidArgument, "need d - k + lambda + 1 assignments");
  }
  for (const auto& a : assignments) {
    if (a.dim() != k || a.ambient_dim() != d) throw Error(ErrorCode::DimensionMismatch, "assignments must have dimension k");
    if (a.kind() == masses::Kind::CustomHalfspaceFn) throw Error(ErrorCode::UnsupportedKind, "need mass assignments");
  }
}

int TransversalProblem::residual_size() const {
  int n = 0;
  for (int i = 1; i <= d - lambda; ++i) n += d - i;
  return n;
}

int TransversalProblem::block_offset(int i) const {
  int off = 0;
  for (int t = 1; t < i; ++t) off += d - t;
  return off;
}

TransversalState transversal_state(const TransversalProblem& p, const Mat& directions) {
  if (directions.rows() != p.d || directions.cols() != p.frame_size()) {
    throw Error(ErrorCode::DimensionMismatch, "frame must lie in V_{d-lambda}(R^d)");
  }
  TransversalState st;
  geom::Flat s = geom::Flat::whole_space(p.d);
  for (int i = 1; i <= p.d - p.k; ++i) {
    const Vec v = directions.col(p.m() + i - 1);
    Vec in_parent = s.basis().transpose() * v;
    const double norm = in_parent.norm();
    if (norm <= tol::rank) throw Error(ErrorCode::DegenerateDirection, "frame vector is orthogonal to its flat");
    in_parent /= norm;
    auto cut = geom::sub_flat(s, in_parent, 0.0);
    st.plus_sides.push_back(cut.plus);
    s = std::move(cut.child);
  }
  st.s_k = s;
  st.q = s.basis().transpose() * directions.leftCols(p.m());
  const double t = p.threshold();
  for (const auto& a : p.assignments) {
    st.sigma.push_back(masses::assign(a, s).project(st.q));
    st.p.push_back(region_barycenter(centerpoint_region(st.sigma.back(), t)));
  }
  return st;
}

Vec evaluate_transversal_map(const TransversalProblem& p, const geom::Frame& frame) {
  const auto st = transversal_state(p, frame.vectors());
  Vec x = Vec::Zero(p.residual_size());
  const int n = p.d - p.k + p.lambda;
  const Vec& last = st.p.back();
  for (int i = 1; i <= p.m(); ++i) {
    const int off = p.block_offset(i);
    for (int j = 0; j < n; ++j) x(off + j) = st.p[static_cast<std::size_t>(j)](i - 1) - last(i - 1);
  }
  for (int i = 1; i <= p.d - p.k; ++i) {
    const auto& plus = st.plus_sides[static_cast<std::size_t>(i - 1)];
    const int off = p.block_offset(p.m() + i);
    for (int j = 1; j <= p.lambda; ++j) {
      const auto tau = masses::assign(MassAssignment::ball_section(p.d - i + 1, Vec::Unit(p.d, p.d - j), 1.0), plus.carrier);
      x(off + j - 1) = masses::halfspace_mass(tau, plus) - masses::halfspace_mass(tau, plus.opposite());
    }
  }
  return x;
}

TransversalSolution transversal_at(const TransversalProblem& p, const geom::Frame& frame) {
  const auto st = transversal_state(p, frame.vectors());
  TransversalSolution sol;
  sol.frame = frame;
  sol.s_k = st.s_k;
  sol.residual = evaluate_transversal_map(p, frame);
  sol.residual_norm = sol.residual.norm();
  const Mat m_dirs = frame.vectors().leftCols(p.m());
  for (const auto& pj : st.p) sol.centers.push_back(m_dirs * pj);
  // L = p_last + (directions of S_k orthogonal to M).
  Eigen::HouseholderQR<Mat> qr{st.q};
  const Mat full = qr.householderQ();
  const Mat l_dirs = st.s_k.basis() * full.rightCols(p.k - p.m());
  sol.l = geom::Flat(sol.centers.back(), l_dirs);
  for (const auto& s : st.sigma) sol.depths.push_back(tukey_depth(s, st.p.back()));
  sol.vertical = geom::is_k_vertical(st.s_k, p.lambda, 1e-6);
  sol.depth_ok = std::all_of(sol.depths.begin(), sol.depths.end(),
                             [&](double dep) { return dep >= p.threshold() - 1e-6; });
  return sol;
}

TransversalSolution solve_center_transversal(const TransversalProblem& problem, const SolverConfig& cfg) {
  TransversalProblem p = problem;
  for (auto& a : p.assignments) a = flagsolve::prepared(a, cfg);
  p.validate();
  const auto space = stiefel::frame_space(p.d, p.frame_size());
  search::ResidualFn<stiefel::FrameState> f = [&p](const stiefel::FrameState& s) {
    return evaluate_transversal_map(p, s.frame());
  };
  const auto out = search::find_zero(space, f, cfg);
  if (out.best_start < 0) throw Error(ErrorCode::ZeroMass, "no feasible start frame found");
  auto sol = transversal_at(p, out.best.frame());
  sol.effective_target = out.effective_target;
  sol.best_start = out.best_start;
  sol.evaluations = out.evaluations;
  sol.converged = out.converged && sol.vertical && sol.depth_ok;
  return sol;
}

}  // namespace masspart::transversal

#include "masspart/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <boost/math/tools/roots.hpp>

#include "masspart/random.hpp"

namespace masspart::kinetic {

namespace {

void check_weight(double w) {
  if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorCode::InvalidArgument, "weights must be positive");
}

void check_unit(const Vec& u, const char* what) {
  if (std::abs(u.norm() - 1.0) > 1e-9) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be a unit vector");
}

double lambda_of(double tau) { return tau / (1.0 - tau); }
double time_of(double tau) { return tau / (1.0 - std::abs(tau)); }

// Closed-comparison slack for exact (unsmoothed) tracks.
double slack(double h) { return 1e-12 * (1.0 + std::abs(h)); }

double solve_half(const std::function<double(double)>& above, double total, double lo, double hi) {
  auto f = [&](double h) { return above(h) - 0.5 * total; };
  double flo = f(lo), fhi = f(hi);
  if (flo <= 0.0) return lo;
  if (fhi >= 0.0) return hi;
  boost::math::tools::eps_tolerance<double> tolerance(std::numeric_limits<double>::digits - 3);
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tolerance, iters);
  return 0.5 * (a + b);
}

Mat complement_of(const Mat& cols, int d) {
  Eigen::HouseholderQR<Mat> qr{cols};
  const Mat q = qr.householderQ();
  return q.rightCols(d - cols.cols());
}

}  // namespace

void LineFamilyMeasure::validate() const {
  if (sigma < 0.0) throw Error(ErrorCode::InvalidArgument, "sigma must be non-negative");
  for (const auto& l : lines) {
    check_weight(l.weight);
    check_unit(l.direction, "line direction");
    if (l.point.size() != l.direction.size()) throw Error(ErrorCode::DimensionMismatch, "line point/direction sizes");
  }
}

void MovingFamily::validate() const {
  if (sigma < 0.0) throw Error(ErrorCode::InvalidArgument, "sigma must be non-negative");
  for (const auto& m : points) {
    check_weight(m.weight);
    if (m.p.size() != m.w.size()) throw Error(ErrorCode::DimensionMismatch, "position/velocity sizes");
  }
}

void HyperplaneFamilyMeasure::validate() const {
  if (sigma < 0.0) throw Error(ErrorCode::InvalidArgument, "sigma must be non-negative");
  for (const auto& h : hyperplanes) {
    check_weight(h.weight);
    check_unit(h.normal, "hyperplane normal");
  }
}

double vertical_speed(const Line& line, const Vec& v) {
  const double nv = line.direction.dot(v);
  if (std::abs(nv) <= tol::rank) throw Error(ErrorCode::OrthogonalLine, "line is orthogonal to the direction");
  return line.direction(line.direction.size() - 1) / nv;
}

double hyperplane_speed(const Hyperplane& h, const Vec& v) {
  const double nd = h.normal(h.normal.size() - 1);
  if (std::abs(nd) <= tol::rank) throw Error(ErrorCode::VerticalNormalDegenerate, "hyperplane contains the vertical");
  return -h.normal.dot(v) / nd;
}

double moving_speed(const MovingPoint& m, const Vec& v) { return m.w.dot(v); }

// ---------------------------------------------------------------------------

double Tracks::total() const {
  double w = 0.0;
  for (const auto& t : items) w += t.weight;
  return w;
}

double Tracks::above(double param, double h) const {
  double m = 0.0;
  if (sigma > 0.0) {
    const double s = sigma * std::sqrt(1.0 + param * param);
    for (const auto& t : items) m += t.weight * masses::gaussian_tail((h - t.a - param * t.b) / s);
  } else {
    for (const auto& t : items) {
      if (t.a + param * t.b >= h - slack(h)) m += t.weight;
    }
  }
  return m;
}

double Tracks::below(double param, double h) const {
  double m = 0.0;
  if (sigma > 0.0) {
    const double s = sigma * std::sqrt(1.0 + param * param);
    for (const auto& t : items) m += t.weight * masses::gaussian_tail((t.a + param * t.b - h) / s);
  } else {
    for (const auto& t : items) {
      if (t.a + param * t.b <= h + slack(h)) m += t.weight;
    }
  }
  return m;
}

double Tracks::median(double param) const {
  const double total = this->total();
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroMass, "family has no surviving mass");
  std::vector<double> values, weights;
  for (const auto& t : items) {
    values.push_back(t.a + param * t.b);
    weights.push_back(t.weight);
  }
  if (sigma <= 0.0) return masses::weighted_median(values, weights);
  const double s = sigma * std::sqrt(1.0 + param * param);
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return solve_half([&](double h) { return above(param, h); }, total, *lo - 40.0 * s, *hi + 40.0 * s);
}

double Tracks::above_limit(double m) const {
  double mass = 0.0;
  for (const auto& t : items) {
    if (sigma > 0.0) {
      mass += t.weight * masses::gaussian_tail((m - t.b) / sigma);
    } else if (t.b >= m - slack(m)) {
      mass += t.weight;
    }
  }
  return mass;
}

double Tracks::below_limit(double m) const {
  double mass = 0.0;
  for (const auto& t : items) {
    if (sigma > 0.0) {
      mass += t.weight * masses::gaussian_tail((t.b - m) / sigma);
    } else if (t.b <= m + slack(m)) {
      mass += t.weight;
    }
  }
  return mass;
}

double Tracks::median_speed() const {
  const double total = this->total();
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroMass, "family has no surviving mass");
  std::vector<double> speeds, weights;
  for (const auto& t : items) {
    speeds.push_back(t.b);
    weights.push_back(t.weight);
  }
  if (sigma <= 0.0) return masses::weighted_median(speeds, weights);
  const auto [lo, hi] = std::minmax_element(speeds.begin(), speeds.end());
  return solve_half([&](double m) { return above_limit(m); }, total, *lo - 40.0 * sigma, *hi + 40.0 * sigma);
}

Tracks line_tracks(const LineFamilyMeasure& f, const Vec& v) {
  Tracks out;
  out.sigma = f.sigma;
  for (const auto& l : f.lines) {
    if (l.point.size() != v.size()) throw Error(ErrorCode::DimensionMismatch, "line and direction sizes differ");
    if (std::abs(l.direction.dot(v)) <= tol::rank) {
      ++out.dropped;
      continue;
    }
    const double z = vertical_speed(l, v);
    out.items.push_back({l.point(l.point.size() - 1) - l.point.dot(v) * z, z, l.weight});
  }
  return out;
}

Tracks moving_tracks(const MovingFamily& f, const Vec& v) {
  Tracks out;
  out.sigma = f.sigma;
  for (const auto& m : f.points) {
    if (m.p.size() != v.size()) throw Error(ErrorCode::DimensionMismatch, "moving point and direction sizes differ");
    out.items.push_back({m.p.dot(v), m.w.dot(v), m.weight});
  }
  return out;
}

Tracks hyperplane_tracks(const HyperplaneFamilyMeasure& f, const Vec& v) {
  Tracks out;
  out.sigma = f.sigma;
  for (const auto& h : f.hyperplanes) {
    if (h.normal.size() != v.size()) throw Error(ErrorCode::DimensionMismatch, "hyperplane and direction sizes differ");
    const double nd = h.normal(h.normal.size() - 1);
    if (std::abs(nd) <= tol::rank) {
      ++out.dropped;
      continue;
    }
    out.items.push_back({h.offset / nd, hyperplane_speed(h, v), h.weight});
  }
  return out;
}

double median_speed(const LineFamilyMeasure& f, const Vec& v) { return line_tracks(f, v).median_speed(); }
double median_speed(const MovingFamily& f, const Vec& v) { return moving_tracks(f, v).median_speed(); }
double median_speed(const HyperplaneFamilyMeasure& f, const Vec& v) { return hyperplane_tracks(f, v).median_speed(); }

// ---------------------------------------------------------------------------

namespace {

// Residual of tracks[0..n-2] against the pivot tracks.back() at parameter `param`,
// or in the limit (param infinite, sign gives the end).
Vec track_residual(const std::vector<Tracks>& tracks, double param, int end) {
  const auto& pivot = tracks.back();
  Vec r(static_cast<Eigen::Index>(tracks.size() - 1));
  if (end == 0) {
    const double h = pivot.median(param);
    for (std::size_t i = 0; i + 1 < tracks.size(); ++i) {
      if (!(tracks[i].total() > 0.0)) throw Error(ErrorCode::ZeroMass, "family has no surviving mass");
      r(static_cast<Eigen::Index>(i)) = tracks[i].above(param, h) - tracks[i].below(param, h);
    }
  } else {
    const double m = pivot.median_speed();
    for (std::size_t i = 0; i + 1 < tracks.size(); ++i) {
      if (!(tracks[i].total() > 0.0)) throw Error(ErrorCode::ZeroMass, "family has no surviving mass");
      r(static_cast<Eigen::Index>(i)) = end * (tracks[i].above_limit(m) - tracks[i].below_limit(m));
    }
  }
  return r;
}

// Median offsets from the pivot (speeds on the boundary), squashed by atan at the
// smoothing scale. Same zeros as the mass residual for smoothed families.
Vec track_offsets(const std::vector<Tracks>& tracks, double param, int end) {
  const auto& pivot = tracks.back();
  Vec r(static_cast<Eigen::Index>(tracks.size() - 1));
  const double ref = end == 0 ? pivot.median(param) : pivot.median_speed();
  for (std::size_t i = 0; i + 1 < tracks.size(); ++i) {
    const auto& t = tracks[i];
    if (!(t.total() > 0.0)) throw Error(ErrorCode::ZeroMass, "family has no surviving mass");
    const double m = end == 0 ? t.median(param) : t.median_speed();
    double s = end == 0 ? t.sigma * std::sqrt(1.0 + param * param) : t.sigma;
    if (!(s > 0.0)) s = 1.0;
    const double sign = end == 0 ? 1.0 : static_cast<double>(end);
    r(static_cast<Eigen::Index>(i)) = sign * t.total() * std::atan((m - ref) / s) / std::acos(0.0);
  }
  return r;
}

int end_of(const KineticState& s) {
  if (s.tau >= boundary_tau) return 1;
  if (s.tau <= -boundary_tau) return -1;
  return 0;
}

template <class Family, class TrackFn>
std::vector<Tracks> tracks_for(const std::vector<Family>& families, const Vec& v, TrackFn fn, bool pivot_first) {
  std::vector<Tracks> out;
  for (const auto& f : families) out.push_back(fn(f, v));
  if (pivot_first) std::rotate(out.begin(), out.begin() + 1, out.end());
  return out;
}

void check_horizontal_v(const Vec& v) {
  if (std::abs(v(v.size() - 1)) > 1e-9) throw Error(ErrorCode::InvalidArgument, "v must be orthogonal to e_d");
}

template <class Family, class TrackFn>
KineticSolution record(Problem problem, const std::vector<Family>& families, const KineticState& s, TrackFn fn,
                       bool pivot_first) {
  KineticSolution sol;
  sol.problem = problem;
  sol.d = static_cast<int>(s.v.size());
  sol.state = s;
  const auto tracks = tracks_for(families, s.v, fn, pivot_first);
  const int end = end_of(s);
  sol.boundary = end != 0;
  sol.param = end != 0 ? end * std::numeric_limits<double>::infinity()
                       : (problem == Problem::Dynamic ? time_of(s.tau) : lambda_of(s.tau));
  sol.residual = track_residual(tracks, sol.param, end);
  sol.residual_norm = sol.residual.norm();
  if (end == 0) sol.pivot = tracks.back().median(sol.param);
  // Speeds and drop counts in input order.
  for (const auto& f : families) {
    const auto t = fn(f, s.v);
    sol.dropped.push_back(t.dropped);
    sol.median_speeds.push_back(t.total() > 0.0 ? t.median_speed() : std::numeric_limits<double>::quiet_NaN());
  }
  for (std::size_t i = 0; i < sol.dropped.size(); ++i) {
    if (sol.dropped[i] > 0) {
      sol.warnings.push_back("family " + std::to_string(i) + ": dropped " + std::to_string(sol.dropped[i]) +
                             " degenerate members");
    }
  }
  return sol;
}

search::Space<KineticState> kinetic_space(int d, int sphere_coords, double tau_lo) {
  search::Space<KineticState> space;
  const int n = sphere_coords;
  space.dof = n;  // (n - 1) sphere directions plus tau
  space.sample = [d, n, tau_lo](CounterRng& rng) {
    KineticState s;
    s.v = Vec::Zero(d);
    if (n == 1) {
      s.v(0) = rng.uniform() < 0.5 ? -1.0 : 1.0;
    } else {
      s.v.head(n) = rng.unit_vector(n);
    }
    s.tau = rng.uniform(tau_lo, 1.0);
    return s;
  };
  space.retract = [d, n, tau_lo](const KineticState& s, const Vec& step) {
    KineticState out = s;
    if (n > 1) {
      const Mat head = s.v.head(n);
      const Mat t = complement_of(head, n);
      Vec moved = s.v.head(n) + t * step.head(n - 1);
      out.v = Vec::Zero(d);
      out.v.head(n) = moved / moved.norm();
    }
    out.tau = std::clamp(s.tau + step(n - 1), tau_lo, 1.0);
    return out;
  };
  return space;
}

template <class Family>
void check_count(const std::vector<Family>& families, std::size_t want, const char* what) {
  if (families.size() != want) throw Error(ErrorCode::InvalidArgument, what);
  for (const auto& f : families) f.validate();
}

template <class Family>
std::vector<Family> smoothed(std::vector<Family> families, const SolverConfig& cfg) {
  const double sigma = smoothing_for(cfg, data_diameter(families));
  for (auto& f : families) {
    if (f.sigma == 0.0) f.sigma = sigma;
  }
  return families;
}

KineticSolution run(Problem problem, int d, const SolverConfig& cfg, int sphere_coords, double tau_lo,
                    const std::function<Vec(const KineticState&)>& residual,
                    const std::function<Vec(const KineticState&)>& offsets,
                    const std::function<KineticSolution(const KineticState&)>& at) {
  const auto space = kinetic_space(d, sphere_coords, tau_lo);
  // Target scale: mass residual at the search's start states.
  double scale = 0.0;
  for (int i = 0; i < std::max(0, cfg.starts); ++i) {
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(i));
    for (int attempt = 0; attempt < 16; ++attempt) {
      try {
        const Vec r = residual(space.sample(rng));
        if (r.size() > 0 && r.allFinite()) scale = std::max(scale, r.cwiseAbs().maxCoeff());
        break;
      } catch (const Error&) {
      }
    }
  }
  // Stacked residual, then offsets alone, then mass gaps alone; first success wins.
  const std::vector<search::ResidualFn<KineticState>> strategies = {
      [&](const KineticState& s) {
        const Vec a = residual(s);
        const Vec b = offsets(s);
        Vec r(a.size() + b.size());
        r << a, b;
        return r;
      },
      offsets, residual};
  const double target = cfg.target * (scale > 0.0 ? scale : 1.0);
  std::optional<KineticSolution> best;
  for (const auto& f : strategies) {
    const auto out = search::find_zero(space, f, cfg);
    if (out.best_start < 0) continue;
    auto sol = at(out.best);
    if (!best || sol.residual_norm < best->residual_norm) best = std::move(sol);
    if (best->residual_norm <= target) break;
  }
  if (!best) throw Error(ErrorCode::ZeroMass, "no feasible start found");
  auto sol = std::move(*best);
  sol.problem = problem;
  sol.effective_target = target;
  sol.converged = sol.residual_norm <= target;
  return sol;
}

}  // namespace

Vec horizontal_residual(const std::vector<LineFamilyMeasure>& families, const KineticState& s) {
  check_horizontal_v(s.v);
  const auto tracks = tracks_for(families, s.v, line_tracks, false);
  const int end = end_of(s);
  return track_residual(tracks, end != 0 ? 0.0 : lambda_of(s.tau), end);
}

Vec dynamic_residual(const std::vector<MovingFamily>& families, const KineticState& s) {
  const auto tracks = tracks_for(families, s.v, moving_tracks, true);
  const int end = end_of(s);
  return track_residual(tracks, end != 0 ? 0.0 : time_of(s.tau), end);
}

Vec translated_line_residual(const std::vector<HyperplaneFamilyMeasure>& families, const KineticState& s) {
  check_horizontal_v(s.v);
  const auto tracks = tracks_for(families, s.v, hyperplane_tracks, false);
  const int end = end_of(s);
  return track_residual(tracks, end != 0 ? 0.0 : lambda_of(s.tau), end);
}

KineticSolution horizontal_at(const std::vector<LineFamilyMeasure>& families, const KineticState& s) {
  check_horizontal_v(s.v);
  return record(Problem::Horizontal, families, s, line_tracks, false);
}

KineticSolution dynamic_at(const std::vector<MovingFamily>& families, const KineticState& s) {
  auto sol = record(Problem::Dynamic, families, s, moving_tracks, true);
  if (sol.d % 2 == 0) {
    sol.warnings.push_back("ParityWarning: d is even, a common bisection is not guaranteed");
  }
  return sol;
}

KineticSolution translated_line_at(const std::vector<HyperplaneFamilyMeasure>& families, const KineticState& s) {
  check_horizontal_v(s.v);
  return record(Problem::TranslatedLine, families, s, hyperplane_tracks, false);
}

namespace {

template <class Family, class TrackFn>
Vec offsets_of(const std::vector<Family>& families, const KineticState& s, TrackFn fn, bool dynamic) {
  if (!dynamic) check_horizontal_v(s.v);
  const auto tracks = tracks_for(families, s.v, fn, dynamic);
  const int end = end_of(s);
  return track_offsets(tracks, end != 0 ? 0.0 : (dynamic ? time_of(s.tau) : lambda_of(s.tau)), end);
}

}  // namespace

KineticSolution horizontal_solve(int d, const std::vector<LineFamilyMeasure>& families, const SolverConfig& cfg) {
  if (d < 2) throw Error(ErrorCode::InvalidArgument, "need d >= 2");
  check_count(families, static_cast<std::size_t>(d), "need d line families");
  for (const auto& f : families) {
    for (const auto& l : f.lines) {
      if (l.point.size() != d) throw Error(ErrorCode::DimensionMismatch, "lines must live in R^d");
    }
  }
  const auto fam = smoothed(families, cfg);
  return run(Problem::Horizontal, d, cfg, d - 1, 0.0,
             [&](const KineticState& s) { return horizontal_residual(fam, s); },
             [&](const KineticState& s) { return offsets_of(fam, s, line_tracks, false); },
             [&](const KineticState& s) { return horizontal_at(fam, s); });
}

KineticSolution dynamic_solve(int d, const std::vector<MovingFamily>& families, const SolverConfig& cfg) {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "need d >= 1");
  check_count(families, static_cast<std::size_t>(d + 1), "need d + 1 moving families");
  for (const auto& f : families) {
    for (const auto& m : f.points) {
      if (m.p.size() != d) throw Error(ErrorCode::DimensionMismatch, "moving points must live in R^d");
    }
  }
  const auto fam = smoothed(families, cfg);
  return run(Problem::Dynamic, d, cfg, d, -1.0,
             [&](const KineticState& s) { return dynamic_residual(fam, s); },
             [&](const KineticState& s) { return offsets_of(fam, s, moving_tracks, true); },
             [&](const KineticState& s) { return dynamic_at(fam, s); });
}

KineticSolution translated_line_solve(int d, const std::vector<HyperplaneFamilyMeasure>& families,
                                      const SolverConfig& cfg) {
  if (d < 2) throw Error(ErrorCode::InvalidArgument, "need d >= 2");
  check_count(families, static_cast<std::size_t>(d), "need d hyperplane families");
  for (const auto& f : families) {
    for (const auto& h : f.hyperplanes) {
      if (h.normal.size() != d) throw Error(ErrorCode::DimensionMismatch, "hyperplanes must live in R^d");
    }
  }
  const auto fam = smoothed(families, cfg);
  return run(Problem::TranslatedLine, d, cfg, d - 1, 0.0,
             [&](const KineticState& s) { return translated_line_residual(fam, s); },
             [&](const KineticState& s) { return offsets_of(fam, s, hyperplane_tracks, false); },
             [&](const KineticState& s) { return translated_line_at(fam, s); });
}

// ---------------------------------------------------------------------------

geom::Flat KineticSolution::vertical_hyperplane() const {
  if (boundary) throw Error(ErrorCode::InvalidArgument, "boundary solutions have no hyperplane");
  return geom::Flat::through(param * state.v, complement_of(state.v, d));
}

geom::Flat KineticSolution::horizontal_flat() const {
  if (boundary) throw Error(ErrorCode::InvalidArgument, "boundary solutions have no horizontal flat");
  Mat vz(d, 2);
  vz.col(0) = state.v;
  vz.col(1) = Vec::Unit(d, d - 1);
  const Vec base = param * state.v + pivot * Vec::Unit(d, d - 1);
  if (d == 2) return geom::Flat::point(base);
  return geom::Flat::through(base, complement_of(vz, d));
}

geom::Flat KineticSolution::translated_line() const {
  if (boundary) throw Error(ErrorCode::InvalidArgument, "boundary solutions have no line");
  return geom::Flat::through(param * state.v, Mat(Vec::Unit(d, d - 1)));
}

Vec KineticSolution::split_point() const {
  if (boundary) throw Error(ErrorCode::InvalidArgument, "boundary solutions have no split point");
  return param * state.v + pivot * Vec::Unit(d, d - 1);
}

geom::Flat KineticSolution::dynamic_hyperplane() const {
  if (boundary) throw Error(ErrorCode::InvalidArgument, "boundary solutions have no hyperplane");
  return geom::Flat::through(pivot * state.v, complement_of(state.v, d));
}

double smoothing_for(const SolverConfig& cfg, double diameter) {
  if (cfg.mollify > 0.0) return cfg.mollify;
  if (cfg.requires_continuity) return 1e-3 * (diameter > 0.0 ? diameter : 1.0);
  return 0.0;
}

namespace {

double diameter_of(const std::vector<Vec>& pts) {
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::max(best, (pts[i] - pts[j]).norm());
  }
  return best;
}

}  // namespace

double data_diameter(const std::vector<LineFamilyMeasure>& families) {
  std::vector<Vec> pts;
  for (const auto& f : families) {
    for (const auto& l : f.lines) pts.push_back(l.point);
  }
  return diameter_of(pts);
}

double data_diameter(const std::vector<MovingFamily>& families) {
  std::vector<Vec> pts;
  for (const auto& f : families) {
    for (const auto& m : f.points) pts.push_back(m.p);
  }
  return diameter_of(pts);
}

double data_diameter(const std::vector<HyperplaneFamilyMeasure>& families) {
  std::vector<Vec> pts;
  for (const auto& f : families) {
    for (const auto& h : f.hyperplanes) pts.push_back(h.offset * h.normal);
  }
  return diameter_of(pts);
}

// ---------------------------------------------------------------------------

double parity_det_closed(int d, double t) {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "need d >= 1");
  return std::pow(1.0 - t, d + 1) + (d % 2 == 0 ? 1.0 : -1.0) * std::pow(t, d + 1);
}

Mat parity_matrix(int d, double t) {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "need d >= 1");
  const int n = d + 1;
  Mat a = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = 1.0 - t;
    a((i + 1) % n, i) += t;
  }
  return a;
}

double parity_det_direct(int d, double t) { return parity_matrix(d, t).partialPivLu().determinant(); }

ParityInstance parity_counterexample(int d) {
  if (d < 2 || d % 2 != 0) throw Error(ErrorCode::OddDimension, "the counterexample needs an even d >= 2");
  ParityInstance inst;
  inst.d = d;
  const int n = d + 1;
  for (int i = 0; i < n; ++i) {
    MovingFamily f;
    f.points.push_back({Vec::Unit(n, i), Vec::Unit(n, (i + 1) % n) - Vec::Unit(n, i), 1.0});
    inst.families.push_back(std::move(f));
  }
  return inst;
}

std::vector<MovingFamily> three_moving_points(double sigma) {
  const auto inst = parity_counterexample(2);
  Mat basis(3, 2);
  basis.col(0) = Vec{{1.0, -1.0, 0.0}} / std::sqrt(2.0);
  basis.col(1) = Vec{{1.0, 1.0, -2.0}} / std::sqrt(6.0);
  const Vec centroid = Vec::Constant(3, 1.0 / 3.0);
  std::vector<MovingFamily> out;
  for (const auto& f : inst.families) {
    MovingFamily g;
    g.sigma = sigma;
    for (const auto& m : f.points) g.points.push_back({basis.transpose() * (m.p - centroid), basis.transpose() * m.w, m.weight});
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace masspart::kinetic

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "internal.hpp"

namespace masspart::harness {

namespace {

using masses::FlatMeasure;

constexpr double incidence_tol = 1e-6;

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedSolution, what); }

struct Gap {
  double plus = 0.0;
  double minus = 0.0;
  double value() const { return plus - minus; }
};

Gap gap_on(const FlatMeasure& m, const Vec& u, double c) { return Gap{m.mass_above(u, c), m.mass_below(u, c)}; }

Gap gap_on(const MassAssignment& a, const geom::HalfFlat& h) {
  const auto m = masses::assign(a, h.carrier);
  return Gap{masses::halfspace_mass(m, h), masses::halfspace_mass(m, h.opposite())};
}

struct Builder {
  std::vector<double> residual;
  std::vector<SideMasses> masses;
  void add(const std::string& label, Gap g, bool counts = true) {
    masses.push_back(SideMasses{label, g.plus, g.minus});
    if (counts) residual.push_back(g.value());
  }
};

// Depth of x for a 2-D measure. Atoms without smoothing: exact, by testing one
// direction inside every arc between critical directions.
double depth_2d(const FlatMeasure& m, const Vec& x) {
  const double total = m.total_mass();
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroMass, "empty measure");
  auto mass_at = [&](double t) {
    const Vec u{{std::cos(t), std::sin(t)}};
    return m.mass_above(u, u.dot(x));
  };
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double best = std::numeric_limits<double>::infinity();
  if (m.form() == FlatMeasure::Form::Atoms && !m.mollified()) {
    std::vector<double> crit;
    for (Eigen::Index j = 0; j < m.atom_coords().cols(); ++j) {
      const Vec dx = m.atom_coords().col(j) - x;
      if (dx.norm() <= tol::geo) continue;
      const double a = std::atan2(dx(1), dx(0));
      for (double off : {0.5, 1.5}) crit.push_back(std::fmod(a + off * std::numbers::pi + 2.0 * two_pi, two_pi));
    }
    std::sort(crit.begin(), crit.end());
    if (crit.empty()) return mass_at(0.0) / total;
    for (std::size_t i = 0; i < crit.size(); ++i) {
      const double next = i + 1 < crit.size() ? crit[i + 1] : crit.front() + two_pi;
      best = std::min(best, mass_at(0.5 * (crit[i] + next)));
    }
    return best / total;
  }
  constexpr int n = 4096;
  std::vector<double> vals(n);
  for (int i = 0; i < n; ++i) vals[static_cast<std::size_t>(i)] = mass_at(two_pi * i / n);
  const double h = two_pi / n;
  for (int i = 0; i < n; ++i) {
    const double v = vals[static_cast<std::size_t>(i)];
    best = std::min(best, v);
    const double prev = vals[static_cast<std::size_t>((i + n - 1) % n)];
    const double next = vals[static_cast<std::size_t>((i + 1) % n)];
    if (v > prev || v > next) continue;
    // Golden-section search on the bracket around a local minimum.
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = h * (i - 1), b = h * (i + 1);
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = mass_at(c), fd = mass_at(d);
    for (int it = 0; it < 50; ++it) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = mass_at(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = mass_at(d);
      }
    }
    best = std::min({best, fc, fd});
  }
  return best / total;
}

double depth_of(const FlatMeasure& m, const Vec& x) {
  if (m.dim() == 0) return 1.0;
  if (m.dim() == 1) {
    const double total = m.total_mass();
    if (!(total > 0.0)) throw Error(ErrorCode::ZeroMass, "empty measure");
    const Vec u = Vec::Ones(1);
    return std::min(m.mass_above(u, x(0)), m.mass_below(u, x(0))) / total;
  }
  if (m.dim() == 2) return depth_2d(m, x);
  throw Error(ErrorCode::UnsupportedDimension, "depth is only computed in dimension 1 and 2");
}

// Complement of span(a) inside R^n (a has orthonormal columns).
Mat complement(const Mat& a, int n) {
  if (a.cols() == 0) return Mat::Identity(n, n);
  Eigen::HouseholderQR<Mat> qr(a);
  return Mat(qr.householderQ()).rightCols(n - a.cols());
}

void verify_flag(const Instance& p, const Solution& sol, Builder& b, Report& r) {
  if (!sol.flag) malformed("solution has no flag");
  const auto& flag = *sol.flag;
  const auto prob = p.fairy_problem();
  if (static_cast<int>(flag.size()) != prob.frame_size() || flag.ambient_dim() != p.d) {
    malformed("flag has the wrong shape");
  }
  for (int i = p.d - 1; i >= p.k - 1; --i) {
    const auto& lvl = prob.level(i);
    const auto plus = flag.plus_side(i);
    const std::string at = "S_" + std::to_string(i);
    b.add(at + " pivot", gap_on(lvl.pivot, plus));
    for (std::size_t j = 0; j < lvl.functionals.size(); ++j) {
      if (lvl.functionals[j].is_zero_functional()) continue;
      b.add(at + " f" + std::to_string(j), gap_on(lvl.functionals[j], plus));
    }
  }
  r.checks.emplace_back("nested", true);
  if (p.kind == Kind::Rotation) {
    const geom::Flat s_k = p.k == p.d ? geom::Flat::whole_space(p.d) : flag.at_dim(p.k).flat;
    r.checks.emplace_back("vertical", geom::is_k_vertical(s_k, p.k - 1, incidence_tol));
    r.checks.emplace_back("through_origin", s_k.distance(Vec::Zero(p.d)) <= incidence_tol);
  }
}

void verify_transversal(const Instance& p, const Solution& sol, Builder& b, Report& r) {
  if (!sol.s_k || !sol.l) malformed("solution has no S_k or L");
  const auto& s_k = *sol.s_k;
  const auto& l = *sol.l;
  if (s_k.ambient_dim() != p.d || l.ambient_dim() != p.d) malformed("flats live in the wrong space");
  const bool dims = s_k.dim() == p.k && l.dim() == p.lambda;
  r.checks.emplace_back("dimensions", dims);
  r.checks.emplace_back("through_origin", s_k.distance(Vec::Zero(p.d)) <= incidence_tol);
  r.checks.emplace_back("vertical", geom::is_k_vertical(s_k, p.lambda, incidence_tol));
  r.checks.emplace_back("contains_l", s_k.contains(l, incidence_tol));
  if (!dims) malformed("S_k or L has the wrong dimension");
  const int m = p.k - p.lambda;
  const double threshold = 1.0 / (m + 1);
  const Mat l_dirs = s_k.basis().transpose() * l.basis();
  const Mat q = complement(geom::orthonormalize(l_dirs).vectors(), p.k);
  for (std::size_t j = 0; j < p.assignments.size(); ++j) {
    const auto on_s = masses::assign(p.assignments[j], s_k);
    const auto on_m = on_s.project(q);
    const Vec x = on_m.carrier().coordinates(l.base());
    const double depth = depth_of(on_m, x);
    r.masses.push_back(SideMasses{"mu" + std::to_string(j) + " depth", depth, threshold});
    b.residual.push_back(std::max(0.0, threshold - depth));
  }
}

// Speed of each member for the boundary check, with degenerate members skipped.
template <class Family, class SpeedFn>
FlatMeasure speed_measure(const Family& members, double sigma, SpeedFn speed) {
  std::vector<double> s, w;
  for (const auto& item : members) {
    const auto v = speed(item);
    if (!v) continue;
    s.push_back(*v);
    w.push_back(item.weight);
  }
  Mat coords(1, static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) coords(0, static_cast<Eigen::Index>(i)) = s[i];
  return FlatMeasure::atoms(geom::Flat::whole_space(1), coords,
                            Eigen::Map<const Vec>(w.data(), static_cast<Eigen::Index>(w.size())), sigma);
}

void verify_boundary(const std::vector<FlatMeasure>& speeds, std::size_t pivot, Builder& b) {
  const Vec u = Vec::Ones(1);
  const double mp = masses::median_offset(speeds[pivot], u);
  for (std::size_t i = 0; i < speeds.size(); ++i) {
    const double mi = masses::median_offset(speeds[i], u);
    b.masses.push_back(SideMasses{"family " + std::to_string(i), speeds[i].mass_above(u, mp),
                                  speeds[i].mass_below(u, mp)});
    if (i != pivot) b.residual.push_back(mi - mp);
  }
}

MassAssignment smoothed(MassAssignment a, double sigma) { return sigma > 0.0 ? masses::mollify(a, sigma) : a; }

void verify_kinetic(const Instance& p, const Solution& sol, Builder& b, Report& r) {
  const int d = p.d;
  if (sol.v.size() != d) malformed("solution direction has the wrong size");
  const Vec v = sol.v;
  r.checks.emplace_back("unit_direction", std::abs(v.norm() - 1.0) <= 1e-9);
  if (p.kind != Kind::Dynamic) r.checks.emplace_back("horizontal_direction", std::abs(v(d - 1)) <= 1e-9);
  const Vec ed = Vec::Unit(d, d - 1);
  const double param = sol.param;
  const double grow = std::sqrt(1.0 + param * param);

  if (sol.boundary) {
    std::vector<FlatMeasure> speeds;
    std::size_t pivot = 0;
    if (p.kind == Kind::Horizontal) {
      for (const auto& f : p.lines) {
        speeds.push_back(speed_measure(f.lines, f.sigma, [&](const masses::Line& l) -> std::optional<double> {
          const double dv = l.direction.dot(v);
          if (std::abs(dv) <= tol::rank) return std::nullopt;
          return l.direction(d - 1) / dv;
        }));
      }
      pivot = speeds.size() - 1;
    } else if (p.kind == Kind::TranslatedLine) {
      for (const auto& f : p.planes) {
        speeds.push_back(speed_measure(f.hyperplanes, f.sigma, [&](const masses::Hyperplane& h) -> std::optional<double> {
          const double nd = h.normal(d - 1);
          if (std::abs(nd) <= tol::rank) return std::nullopt;
          return -h.normal.dot(v) / nd;
        }));
      }
      pivot = speeds.size() - 1;
    } else {
      for (const auto& f : p.moving) {
        speeds.push_back(speed_measure(f.points, f.sigma, [&](const kinetic::MovingPoint& m) -> std::optional<double> {
          return m.w.dot(v);
        }));
      }
    }
    verify_boundary(speeds, pivot, b);
    return;
  }

  if (!std::isfinite(param)) malformed("interior solution needs a finite parameter");
  const double h = sol.pivot;
  std::vector<Gap> gaps;
  std::size_t pivot = 0;
  if (p.kind == Kind::Horizontal) {
    const Mat dirs = complement(Mat(v), d);
    const auto s = geom::Flat::through(param * v, dirs);
    r.checks.emplace_back("vertical", geom::is_k_vertical(s, 1, incidence_tol));
    const Vec u = s.basis().transpose() * ed;
    for (const auto& f : p.lines) {
      const auto a = smoothed(MassAssignment::line_family(f.lines), f.sigma * grow);
      gaps.push_back(gap_on(masses::assign(a, s), u, h));
    }
    pivot = gaps.size() - 1;
  } else if (p.kind == Kind::TranslatedLine) {
    const auto line = geom::Flat::through(param * v, Mat(ed));
    const Vec u = line.basis().transpose() * ed;
    for (const auto& f : p.planes) {
      const auto a = smoothed(MassAssignment::hyperplane_family(f.hyperplanes), f.sigma * grow);
      gaps.push_back(gap_on(masses::assign(a, line), u, h));
    }
    pivot = gaps.size() - 1;
  } else {
    const auto space = geom::Flat::whole_space(d);
    for (const auto& f : p.moving) {
      Mat pts(d, static_cast<Eigen::Index>(f.points.size()));
      Vec w(static_cast<Eigen::Index>(f.points.size()));
      for (std::size_t j = 0; j < f.points.size(); ++j) {
        pts.col(static_cast<Eigen::Index>(j)) = f.points[j].p + param * f.points[j].w;
        w(static_cast<Eigen::Index>(j)) = f.points[j].weight;
      }
      const auto a = smoothed(MassAssignment::projected_cloud(d, pts, w), f.sigma * grow);
      gaps.push_back(gap_on(masses::assign(a, space), v, h));
    }
  }
  for (std::size_t i = 0; i < gaps.size(); ++i) b.add("family " + std::to_string(i), gaps[i], i != pivot);
}

}  // namespace

Report verify(const Instance& inst, const Solution& sol, const std::optional<OracleResult>& oracle) {
  inst.validate();
  if (sol.kind != inst.kind) malformed("solution kind does not match the instance");
  const Instance p = detail::prepared(inst);
  Report r;
  r.kind = inst.kind;
  r.solution = sol;
  r.target = inst.config.target;
  r.dropped = sol.dropped;
  r.warnings = sol.warnings;
  Builder b;
  switch (p.kind) {
    case Kind::Fairy:
    case Kind::Rotation:
    case Kind::HamSandwich:
      verify_flag(p, sol, b, r);
      break;
    case Kind::Transversal:
      verify_transversal(p, sol, b, r);
      break;
    case Kind::Horizontal:
    case Kind::Dynamic:
    case Kind::TranslatedLine:
      verify_kinetic(p, sol, b, r);
      break;
  }
  r.residual = Eigen::Map<const Vec>(b.residual.data(), static_cast<Eigen::Index>(b.residual.size()));
  r.residual_norm = r.residual.norm();
  r.masses.insert(r.masses.begin(), b.masses.begin(), b.masses.end());
  r.oracle = oracle;
  if (oracle && std::isfinite(oracle->min_residual)) r.oracle_gap = std::max(0.0, r.residual_norm - oracle->min_residual);
  const bool checks = std::all_of(r.checks.begin(), r.checks.end(), [](const auto& c) { return c.second; });
  r.pass = std::isfinite(r.residual_norm) && r.residual_norm <= r.target && checks && r.oracle_gap <= r.target;
  return r;
}

}  // namespace masspart::harness

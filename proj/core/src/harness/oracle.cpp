#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "internal.hpp"
#include "masspart/stiefel.hpp"

namespace masspart::harness {

namespace {

constexpr double pi = std::numbers::pi;
constexpr int max_dof = 4;
constexpr std::size_t pool_size = 64;
constexpr std::size_t refine_from = 8;

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool periodic = false;
  int n = 1;

  double at(int i) const {
    if (periodic) return lo + (hi - lo) * i / n;
    if (n == 1) return 0.5 * (lo + hi);
    return lo + (hi - lo) * i / (n - 1);
  }
  double cell() const { return periodic ? 1.0 / n : (n > 1 ? 1.0 / (n - 1) : 0.0); }
};

struct Grid {
  std::vector<Axis> axes;
  std::function<Vec(const Vec&)> residual;
  int dof = 0;
};

double norm_at(const Grid& g, const Vec& params) {
  try {
    const double n = g.residual(params).norm();
    return std::isfinite(n) ? n : std::numeric_limits<double>::infinity();
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

/// Unit-cube coordinates to parameters; closed axes are clamped.
Vec to_params(const Grid& g, const Vec& u) {
  Vec p(static_cast<Eigen::Index>(g.axes.size()));
  for (std::size_t i = 0; i < g.axes.size(); ++i) {
    const auto& a = g.axes[i];
    const double t = a.periodic ? u(static_cast<Eigen::Index>(i)) : std::clamp(u(static_cast<Eigen::Index>(i)), 0.0, 1.0);
    p(static_cast<Eigen::Index>(i)) = a.lo + (a.hi - a.lo) * t;
  }
  return p;
}

struct Cell {
  double value = std::numeric_limits<double>::infinity();
  long index = -1;
  Vec u;
};

bool better(const Cell& a, const Cell& b) { return a.value < b.value || (a.value == b.value && a.index < b.index); }

void keep_best(std::vector<Cell>& best, Cell c) {
  best.push_back(std::move(c));
  std::sort(best.begin(), best.end(), better);
  if (best.size() > pool_size) best.pop_back();
}

/// More than one cell apart along some axis (periodic axes wrap).
bool apart(const Grid& g, const Cell& a, const Cell& b) {
  for (std::size_t i = 0; i < g.axes.size(); ++i) {
    const auto e = static_cast<Eigen::Index>(i);
    double du = std::abs(a.u(e) - b.u(e));
    if (g.axes[i].periodic) du = std::min(du, 1.0 - du);
    if (du > 1.5 * g.axes[i].cell()) return true;
  }
  return false;
}

/// Best cells from distinct neighbourhoods, in order.
std::vector<Cell> seeds(const Grid& g, const std::vector<Cell>& pool) {
  std::vector<Cell> out;
  for (const auto& c : pool) {
    if (out.size() == refine_from) break;
    if (std::all_of(out.begin(), out.end(), [&](const Cell& o) { return apart(g, c, o); })) out.push_back(c);
  }
  return out;
}

OracleResult run_grid(const Grid& g, const std::string& mode, int resolution) {
  if (g.dof > max_dof) {
    throw Error(ErrorCode::SearchSpaceTooLarge, "oracle search space has dimension " + std::to_string(g.dof) + " > 4");
  }
  const auto n_axes = g.axes.size();
  long inner = 1;
  for (std::size_t i = 1; i < n_axes; ++i) inner *= g.axes[i].n;
  const int outer = g.axes.front().n;

  std::vector<std::vector<Cell>> partial(static_cast<std::size_t>(outer));
  search::parallel_for(outer, [&](int i0) {
    auto& best = partial[static_cast<std::size_t>(i0)];
    std::vector<int> idx(n_axes, 0);
    idx[0] = i0;
    Vec params(static_cast<Eigen::Index>(n_axes));
    Vec u(static_cast<Eigen::Index>(n_axes));
    for (long j = 0; j < inner; ++j) {
      long rest = j;
      for (std::size_t a = n_axes; a-- > 1;) {
        idx[a] = static_cast<int>(rest % g.axes[a].n);
        rest /= g.axes[a].n;
      }
      for (std::size_t a = 0; a < n_axes; ++a) {
        const auto& ax = g.axes[a];
        params(static_cast<Eigen::Index>(a)) = ax.at(idx[a]);
        u(static_cast<Eigen::Index>(a)) = (params(static_cast<Eigen::Index>(a)) - ax.lo) / (ax.hi - ax.lo);
      }
      const double v = norm_at(g, params);
      if (best.size() < pool_size || v < best.back().value) keep_best(best, Cell{v, i0 * inner + j, u});
    }
  });
  std::vector<Cell> best;
  for (auto& p : partial) {
    for (auto& c : p) keep_best(best, std::move(c));
  }

  OracleResult out;
  out.mode = mode;
  out.resolution = resolution;
  out.dof = g.dof;
  out.evaluations = static_cast<long>(outer) * inner;
  if (best.empty() || !std::isfinite(best.front().value)) {
    out.grid_min = out.min_residual = std::numeric_limits<double>::infinity();
    return out;
  }
  out.grid_min = best.front().value;
  out.grid_argmin = to_params(g, best.front().u);

  // Refinement in unit-cube coordinates: pattern search, then a short polish.
  search::Space<Vec> space;
  space.dof = static_cast<int>(n_axes);
  space.retract = [&g](const Vec& u, const Vec& step) {
    Vec next = u + step;
    for (std::size_t i = 0; i < g.axes.size(); ++i) {
      if (!g.axes[i].periodic) next(static_cast<Eigen::Index>(i)) = std::clamp(next(static_cast<Eigen::Index>(i)), 0.0, 1.0);
    }
    return next;
  };
  const search::ResidualFn<Vec> f = [&g](const Vec& u) { return g.residual(to_params(g, u)); };
  double cell = 0.0;
  for (const auto& a : g.axes) cell = std::max(cell, a.cell());
  out.min_residual = out.grid_min;
  out.argmin = out.grid_argmin;
  for (const auto& c : seeds(g, best)) {
    if (!std::isfinite(c.value)) continue;
    long evals = 0;
    auto cur = search::detail::evaluate(f, c.u, evals);
    double step = std::max(cell, 1e-6);
    int sweeps = 400;
    search::detail::pattern_search(space, f, cur, 0.0, step, 1e-13, sweeps, evals);
    int lm = 60;
    search::detail::levenberg_marquardt(space, f, cur, 0.0, lm, evals);
    out.evaluations += evals;
    if (cur.norm < out.min_residual) {
      out.min_residual = cur.norm;
      out.argmin = to_params(g, cur.x);
    }
  }
  return out;
}

double data_radius(const std::vector<MassAssignment>& as) {
  double r = 1.0;
  for (const auto& a : as) {
    switch (a.kind()) {
      case masses::Kind::ProjectedCloud:
        for (Eigen::Index j = 0; j < a.points().cols(); ++j) {
          r = std::max(r, a.points().col(j).norm() + 4.0 * a.mollify_sigma());
        }
        break;
      case masses::Kind::ProjectedBall:
      case masses::Kind::BallSection:
        r = std::max(r, a.center().norm() + a.radius());
        break;
      default:
        break;
    }
  }
  return 1.05 * r;
}

std::vector<Axis> sphere_axes(int n, int resolution) {
  std::vector<Axis> axes;
  if (n == 1) {
    axes.push_back(Axis{0.0, 2.0 * pi, true, 2});
    return axes;
  }
  for (int i = 0; i + 2 < n; ++i) axes.push_back(Axis{0.0, pi, false, resolution});
  axes.push_back(Axis{0.0, 2.0 * pi, true, resolution});
  return axes;
}

Vec embed(const Vec& head, int d) {
  Vec v = Vec::Zero(d);
  v.head(head.size()) = head;
  return v;
}

struct KineticMap {
  int n = 0;  // sphere coordinates
  double tau_lo = 0.0;
  std::function<Vec(const kinetic::KineticState&)> residual;
};

KineticMap kinetic_map(const Instance& p) {
  KineticMap m;
  switch (p.kind) {
    case Kind::Horizontal:
      m.n = p.d - 1;
      m.residual = [fams = p.lines](const kinetic::KineticState& s) { return kinetic::horizontal_residual(fams, s); };
      break;
    case Kind::TranslatedLine:
      m.n = p.d - 1;
      m.residual = [fams = p.planes](const kinetic::KineticState& s) {
        return kinetic::translated_line_residual(fams, s);
      };
      break;
    case Kind::Dynamic:
      m.n = p.d;
      m.tau_lo = -1.0;
      m.residual = [fams = p.moving](const kinetic::KineticState& s) { return kinetic::dynamic_residual(fams, s); };
      break;
    default:
      throw Error(ErrorCode::InvalidArgument, "not a kinetic instance");
  }
  return m;
}

bool is_kinetic(Kind k) { return k == Kind::Horizontal || k == Kind::Dynamic || k == Kind::TranslatedLine; }

/// Frame-valued residual for the flag and transversal kinds.
std::pair<int, std::function<Vec(const geom::Frame&)>> frame_map(const Instance& p) {
  if (p.kind == Kind::Transversal) {
    const auto prob = p.transversal_problem();
    return {prob.frame_size(), [prob](const geom::Frame& f) { return transversal::evaluate_transversal_map(prob, f); }};
  }
  const auto prob = p.fairy_problem();
  return {prob.frame_size(), [prob](const geom::Frame& f) { return flagsolve::evaluate_F_pi(prob, f); }};
}

Grid hamsandwich_grid(const Instance& p, int resolution) {
  Grid g;
  g.dof = oracle_dof(p);
  const double r = data_radius(p.assignments);
  const auto as = p.assignments;
  const int d = p.d;
  if (p.k == d) {
    g.axes = sphere_axes(d, resolution);
    g.axes.push_back(Axis{-r, r, false, resolution});
    g.residual = [as, d](const Vec& x) {
      const Vec u = detail::sphere_point(d, x.head(x.size() - 1));
      const double c = x(x.size() - 1);
      Vec out(static_cast<Eigen::Index>(as.size()));
      for (std::size_t i = 0; i < as.size(); ++i) {
        const auto m = masses::assign(as[i], geom::Flat::whole_space(d));
        out(static_cast<Eigen::Index>(i)) = m.mass_above(u, c) - m.mass_below(u, c);
      }
      return out;
    };
    return g;
  }
  if (d != 2 || p.k != 1) {
    throw Error(ErrorCode::SearchSpaceTooLarge, "oracle search space has dimension " + std::to_string(g.dof) + " > 4");
  }
  // Line {<x, n> = c} with n = (cos t, sin t), split at the point c n + s u.
  g.axes = {Axis{0.0, pi, true, resolution}, Axis{-r, r, false, resolution}, Axis{-r, r, false, resolution}};
  g.residual = [as](const Vec& x) {
    const Vec n{{std::cos(x(0)), std::sin(x(0))}};
    const Vec u{{-n(1), n(0)}};
    const auto line = geom::Flat::through(x(1) * n, Mat(u));
    const double c = line.coordinates(x(1) * n + x(2) * u)(0);
    const Vec dir = Vec::Ones(1);
    Vec out(static_cast<Eigen::Index>(as.size()));
    for (std::size_t i = 0; i < as.size(); ++i) {
      const auto m = masses::assign(as[i], line);
      out(static_cast<Eigen::Index>(i)) = m.mass_above(dir, c) - m.mass_below(dir, c);
    }
    return out;
  };
  return g;
}

}  // namespace

int oracle_dof(const Instance& inst) {
  switch (inst.kind) {
    case Kind::Fairy:
    case Kind::Rotation:
      return stiefel::dof(inst.d, inst.d - inst.k + 1);
    case Kind::Transversal:
      return stiefel::dof(inst.d, inst.d - inst.lambda);
    case Kind::Horizontal:
    case Kind::TranslatedLine:
      return inst.d - 1;
    case Kind::Dynamic:
      return inst.d;
    case Kind::HamSandwich:
      return inst.k == inst.d ? inst.d : (inst.k + 1) * (inst.d - inst.k) + inst.k;
  }
  return 0;
}

OracleResult grid_oracle(const Instance& inst, int resolution) {
  inst.validate();
  if (resolution < 2) throw Error(ErrorCode::InvalidArgument, "resolution must be at least 2");
  const int dof = oracle_dof(inst);
  if (dof > max_dof) {
    throw Error(ErrorCode::SearchSpaceTooLarge, "oracle search space has dimension " + std::to_string(dof) + " > 4");
  }
  const Instance p = detail::prepared(inst);
  Grid g;
  g.dof = dof;
  if (p.kind == Kind::HamSandwich) {
    g = hamsandwich_grid(p, resolution);
  } else if (is_kinetic(p.kind)) {
    const auto m = kinetic_map(p);
    g.axes = sphere_axes(m.n, resolution);
    g.axes.push_back(Axis{m.tau_lo, 1.0, false, resolution});
    const int d = p.d;
    g.residual = [m, d](const Vec& x) {
      const Vec head = detail::sphere_point(m.n, x.head(x.size() - 1));
      return m.residual(kinetic::KineticState{embed(head, d), x(x.size() - 1)});
    };
  } else {
    const auto [size, fn] = frame_map(p);
    for (int i = 0; i < dof; ++i) g.axes.push_back(Axis{-pi, pi, true, resolution});
    const int d = p.d;
    g.residual = [d, size, fn](const Vec& x) { return fn(stiefel::from_angles(d, size, x).frame()); };
  }
  if (g.axes.empty()) throw Error(ErrorCode::InvalidArgument, "nothing to search");
  return run_grid(g, "global", resolution);
}

OracleResult local_oracle(const Instance& inst, const Solution& sol, int resolution, double radius) {
  inst.validate();
  if (resolution < 1) throw Error(ErrorCode::InvalidArgument, "resolution must be positive");
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
  const Instance p = detail::prepared(inst);
  Grid g;
  if (is_kinetic(p.kind)) {
    if (sol.v.size() != p.d) throw Error(ErrorCode::MalformedSolution, "solution has no direction v");
    const auto m = kinetic_map(p);
    const int n = m.n;
    const Vec head = sol.v.head(n).normalized();
    Mat tangent = Mat::Zero(n, n - 1);
    if (n > 1) {
      Eigen::HouseholderQR<Mat> qr{Mat(head)};
      tangent = Mat(qr.householderQ()).rightCols(n - 1);
    }
    g.dof = n;
    for (int i = 0; i < n; ++i) g.axes.push_back(Axis{-radius, radius, false, resolution});
    const int d = p.d;
    const double tau0 = sol.tau;
    g.residual = [m, d, n, head, tangent, tau0](const Vec& x) {
      Vec v = head;
      if (n > 1) v = (head + tangent * x.head(n - 1)).normalized();
      const double tau = std::clamp(tau0 + x(n - 1), m.tau_lo, 1.0);
      return m.residual(kinetic::KineticState{embed(v, d), tau});
    };
  } else {
    if (!sol.frame) throw Error(ErrorCode::MalformedSolution, "solution has no frame");
    const auto [size, fn] = frame_map(p);
    if (sol.frame->size() != size || sol.frame->ambient_dim() != p.d) {
      throw Error(ErrorCode::MalformedSolution, "solution frame has the wrong shape");
    }
    g.dof = stiefel::dof(p.d, size);
    for (int i = 0; i < g.dof; ++i) g.axes.push_back(Axis{-radius, radius, false, resolution});
    const auto base = stiefel::complete(*sol.frame);
    const auto space = stiefel::frame_space(p.d, size);
    g.residual = [base, space, fn](const Vec& x) { return fn(space.retract(base, x).frame()); };
  }
  return run_grid(g, "local", resolution);
}

}  // namespace masspart::harness

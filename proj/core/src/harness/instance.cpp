#include <cmath>

#include "internal.hpp"
#include "masspart/random.hpp"

namespace masspart::harness {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); }

void check_dims(const std::vector<MassAssignment>& as, int dim, int d) {
  for (const auto& a : as) {
    if (a.dim() != dim || a.ambient_dim() != d) {
      throw Error(ErrorCode::DimensionMismatch, "assignments must have dimension " + std::to_string(dim) + " in R^" +
                                                    std::to_string(d));
    }
  }
}

template <class Family>
void check_families(const std::vector<Family>& fams, std::size_t want, const char* what) {
  if (fams.size() != want) bad(what);
  for (const auto& f : fams) f.validate();
}

template <class Family>
std::vector<Family> with_smoothing(std::vector<Family> fams, const SolverConfig& cfg) {
  const double sigma = kinetic::smoothing_for(cfg, kinetic::data_diameter(fams));
  for (auto& f : fams) {
    if (f.sigma == 0.0) f.sigma = sigma;
  }
  return fams;
}

}  // namespace

void Instance::validate() const {
  if (d < 1) bad("need d >= 1");
  switch (kind) {
    case Kind::Fairy:
      fairy_problem();
      break;
    case Kind::Rotation:
      if (!mu) bad("rotation instances need mu");
      if (k < 1 || k > d) bad("need 1 <= k <= d");
      check_dims({*mu}, k, d);
      check_dims(assignments, k, d);
      if (static_cast<int>(assignments.size()) != d - 1) bad("rotation instances need d - 1 functionals");
      break;
    case Kind::Transversal:
      transversal_problem().validate();
      break;
    case Kind::HamSandwich:
      if (k < 1 || k > d) bad("need 1 <= k <= d");
      if (assignments.size() < 2) bad("need at least two assignments");
      check_dims(assignments, k, d);
      break;
    case Kind::Horizontal:
      if (d < 2) bad("need d >= 2");
      check_families(lines, static_cast<std::size_t>(d), "need d line families");
      for (const auto& f : lines) {
        for (const auto& l : f.lines) {
          if (l.point.size() != d) throw Error(ErrorCode::DimensionMismatch, "lines must live in R^d");
        }
      }
      break;
    case Kind::Dynamic:
      check_families(moving, static_cast<std::size_t>(d + 1), "need d + 1 moving families");
      for (const auto& f : moving) {
        for (const auto& m : f.points) {
          if (m.p.size() != d) throw Error(ErrorCode::DimensionMismatch, "moving points must live in R^d");
        }
      }
      break;
    case Kind::TranslatedLine:
      if (d < 2) bad("need d >= 2");
      check_families(planes, static_cast<std::size_t>(d), "need d hyperplane families");
      for (const auto& f : planes) {
        for (const auto& h : f.hyperplanes) {
          if (h.normal.size() != d) throw Error(ErrorCode::DimensionMismatch, "hyperplanes must live in R^d");
        }
      }
      break;
  }
}

flagsolve::FairyProblem Instance::fairy_problem() const {
  switch (kind) {
    case Kind::Fairy: {
      flagsolve::FairyProblem p;
      p.d = d;
      p.k = k;
      p.pi = pi;
      p.levels = levels;
      p.allow_surplus = allow_surplus;
      p.validate();
      return p;
    }
    case Kind::Rotation:
      if (!mu) bad("rotation instances need mu");
      return flagsolve::rotation_problem(d, k, *mu, assignments);
    case Kind::HamSandwich:
      return flagsolve::oversubscribed_problem(d, k, assignments);
    default:
      bad("instance kind has no flag problem");
  }
}

transversal::TransversalProblem Instance::transversal_problem() const {
  if (kind != Kind::Transversal) bad("instance kind has no transversal problem");
  return transversal::TransversalProblem{d, k, lambda, assignments};
}

namespace {

Solution from_fairy(Kind kind, const flagsolve::FairySolution& f) {
  Solution s;
  s.kind = kind;
  s.converged = f.converged;
  s.residual = f.residual;
  s.residual_norm = f.residual_norm;
  s.effective_target = f.effective_target;
  s.frame = f.frame;
  s.flag = f.flag;
  return s;
}

Solution from_kinetic(Kind kind, const kinetic::KineticSolution& k) {
  Solution s;
  s.kind = kind;
  s.converged = k.converged;
  s.residual = k.residual;
  s.residual_norm = k.residual_norm;
  s.effective_target = k.effective_target;
  s.v = k.state.v;
  s.tau = k.state.tau;
  s.boundary = k.boundary;
  s.param = k.boundary ? 0.0 : k.param;
  s.pivot = k.boundary ? 0.0 : k.pivot;
  s.median_speeds = k.median_speeds;
  s.dropped = k.dropped;
  s.warnings = k.warnings;
  return s;
}

}  // namespace

Solution solve(const Instance& inst) {
  inst.validate();
  const auto& cfg = inst.config;
  switch (inst.kind) {
    case Kind::Fairy:
    case Kind::HamSandwich:
      return from_fairy(inst.kind, flagsolve::solve_fairy(inst.fairy_problem(), cfg));
    case Kind::Rotation: {
      const auto r = flagsolve::solve_rotation(inst.d, inst.k, *inst.mu, inst.assignments, cfg);
      auto s = from_fairy(inst.kind, r.fairy);
      s.converged = r.converged;
      if (!r.vertical) s.warnings.push_back("S_k is not (k-1)-vertical");
      if (!r.through_origin) s.warnings.push_back("S_k misses the origin");
      return s;
    }
    case Kind::Transversal: {
      const auto t = transversal::solve_center_transversal(inst.transversal_problem(), cfg);
      Solution s;
      s.kind = inst.kind;
      s.converged = t.converged;
      s.residual = t.residual;
      s.residual_norm = t.residual_norm;
      s.effective_target = t.effective_target;
      s.frame = t.frame;
      s.s_k = t.s_k;
      s.l = t.l;
      return s;
    }
    case Kind::Horizontal:
      return from_kinetic(inst.kind, kinetic::horizontal_solve(inst.d, inst.lines, cfg));
    case Kind::Dynamic:
      return from_kinetic(inst.kind, kinetic::dynamic_solve(inst.d, inst.moving, cfg));
    case Kind::TranslatedLine:
      return from_kinetic(inst.kind, kinetic::translated_line_solve(inst.d, inst.planes, cfg));
  }
  bad("unknown kind");
}

// ---------------------------------------------------------------------------

Instance demo_rotation() {
  Instance inst;
  inst.kind = Kind::Rotation;
  inst.name = "rotation d=3 k=2";
  inst.d = 3;
  inst.k = 2;
  CounterRng rng(2024, 0);
  auto cloud = [&](const Vec& shift) {
    Mat pts(3, 12);
    for (int j = 0; j < 12; ++j) pts.col(j) = shift + 0.6 * rng.normal_vector(3);
    return masses::mollify(MassAssignment::projected_cloud(2, pts, Vec::Constant(12, 1.0 / 12.0)), 0.05);
  };
  inst.mu = cloud(Vec{{0.5, -0.3, 0.2}});
  inst.assignments = {cloud(Vec{{-1.0, 0.8, 0.0}}), cloud(Vec{{1.2, 1.0, -0.5}})};
  inst.config.seed = 7;
  return inst;
}

Instance demo_moving_points() {
  Instance inst;
  inst.kind = Kind::Dynamic;
  inst.name = "three moving points";
  inst.d = 2;
  inst.moving = kinetic::three_moving_points();
  return inst;
}

Instance demo_lemma24() {
  Instance inst;
  inst.kind = Kind::HamSandwich;
  inst.name = "three balls, d=2 k=1";
  inst.d = 2;
  inst.k = 1;
  inst.assignments = flagsolve::lemma24_instance(2, 1);
  return inst;
}

// ---------------------------------------------------------------------------

namespace detail {

Instance prepared(const Instance& inst) {
  Instance out = inst;
  const auto& cfg = inst.config;
  for (auto& lvl : out.levels) {
    lvl.pivot = flagsolve::prepared(lvl.pivot, cfg);
    for (auto& f : lvl.functionals) f = flagsolve::prepared(f, cfg);
  }
  if (out.mu) out.mu = flagsolve::prepared(*out.mu, cfg);
  for (auto& a : out.assignments) a = flagsolve::prepared(a, cfg);
  out.lines = with_smoothing(out.lines, cfg);
  out.moving = with_smoothing(out.moving, cfg);
  out.planes = with_smoothing(out.planes, cfg);
  return out;
}

Vec sphere_point(int n, const Vec& angles) {
  Vec v(n);
  if (n == 1) {
    v(0) = std::cos(angles(0)) >= 0.0 ? 1.0 : -1.0;
    return v;
  }
  double s = 1.0;
  for (int i = 0; i < n - 1; ++i) {
    v(i) = s * std::cos(angles(i));
    s *= std::sin(angles(i));
  }
  v(n - 1) = s;
  return v;
}

}  // namespace detail

}  // namespace masspart::harness

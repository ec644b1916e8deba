#include "masspart/flagsolve.hpp"

#include <algorithm>
#include <numeric>

#include "masspart/stiefel.hpp"

namespace masspart::flagsolve {

void FairyProblem::validate() const {
  if (k < 1 || k > d) throw Error(ErrorCode::InvalidArgument, "need 1 <= k <= d");
  const auto n_levels = static_cast<std::size_t>(d - k + 1);
  if (pi.size() != n_levels || levels.size() != n_levels) {
    throw Error(ErrorCode::InvalidArgument, "pi and levels need d-k+1 entries");
  }
  std::vector<int> sorted = pi;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    if (sorted[j] != k - 1 + static_cast<int>(j)) throw Error(ErrorCode::InvalidArgument, "pi is not a permutation");
  }
  for (int i = d - 1; i >= k - 1; --i) {
    const auto& lvl = level(i);
    if (lvl.pivot.dim() != i + 1 || lvl.pivot.ambient_dim() != d) {
      throw Error(ErrorCode::DimensionMismatch, "pivot of level " + std::to_string(i) + " must have dimension i+1");
    }
    if (lvl.pivot.kind() == masses::Kind::CustomHalfspaceFn) {
      throw Error(ErrorCode::UnsupportedKind, "pivots must be mass assignments");
    }
    if (static_cast<int>(lvl.functionals.size()) > pi_of(i) && !allow_surplus) {
      throw Error(ErrorCode::InvalidArgument, "level " + std::to_string(i) + " has more than pi_i functionals");
    }
    for (const auto& f : lvl.functionals) {
      if (f.dim() != i + 1 || f.ambient_dim() != d) {
        throw Error(ErrorCode::DimensionMismatch, "functional of level " + std::to_string(i) + " has wrong dimension");
      }
    }
  }
}

int FairyProblem::surplus_count() const {
  int extra = 0;
  for (int i = d - 1; i >= k - 1; --i) extra += std::max(0, static_cast<int>(level(i).functionals.size()) - pi_of(i));
  return extra;
}

int FairyProblem::residual_size() const {
  int n = 0;
  for (int j = d - 1; j >= k - 1; --j) n += j;
  return n + surplus_count();
}

int FairyProblem::block_offset(int j) const {
  int off = 0;
  for (int t = d - 1; t > j; --t) off += t;
  return off;
}

namespace {

double gap(const masses::FlatMeasure& m, const geom::HalfFlat& plus) {
  return masses::halfspace_mass(m, plus) - masses::halfspace_mass(m, plus.opposite());
}

}  // namespace

MassAssignment prepared(const MassAssignment& a, const SolverConfig& cfg) {
  if (!a.is_discrete() || a.mollify_sigma() > 0.0) return a;
  if (cfg.mollify > 0.0) return masses::mollify(a, cfg.mollify);
  if (cfg.requires_continuity) {
    const double diam = a.data_diameter();
    return masses::mollify(a, 1e-3 * (diam > 0.0 ? diam : 1.0));
  }
  return a;
}

FairyProblem prepare(const FairyProblem& p, const SolverConfig& cfg) {
  FairyProblem out = p;
  for (auto& lvl : out.levels) {
    lvl.pivot = prepared(lvl.pivot, cfg);
    for (auto& f : lvl.functionals) f = prepared(f, cfg);
  }
  return out;
}

geom::Flag flag_from_directions(const FairyProblem& p, const Mat& directions) {
  p.validate();
  if (directions.rows() != p.d || directions.cols() != p.frame_size()) {
    throw Error(ErrorCode::DimensionMismatch, "need one direction per frame vector");
  }
  std::vector<geom::FlagLevel> levels;
  geom::Flat parent = geom::Flat::whole_space(p.d);
  for (int i = p.d - 1; i >= p.k - 1; --i) {
    const Vec v = directions.col(p.column_of(p.pi_of(i)));
    Vec in_parent = parent.basis().transpose() * v;
    const double norm = in_parent.norm();
    if (norm <= tol::rank) {
      throw Error(ErrorCode::DegenerateDirection, "v_" + std::to_string(p.pi_of(i)) + " is orthogonal to S_" +
                                                      std::to_string(i + 1));
    }
    in_parent /= norm;
    const auto pivot = masses::assign(p.level(i).pivot, parent);
    const double offset = masses::median_offset(pivot, in_parent);
    auto cut = geom::sub_flat(parent, in_parent, offset);
    levels.push_back(geom::FlagLevel{cut.child, cut.plus.outward});
    parent = std::move(cut.child);
  }
  return geom::Flag(std::move(levels));
}

geom::Flag flag_from_frame(const FairyProblem& p, const geom::Frame& frame) {
  if (frame.ambient_dim() != p.d || frame.size() != p.frame_size()) {
    throw Error(ErrorCode::DimensionMismatch, "frame must lie in V_{d-k+1}(R^d)");
  }
  return flag_from_directions(p, frame.vectors());
}

Vec residual_of_flag(const FairyProblem& p, const geom::Flag& flag) {
  Vec x = Vec::Zero(p.residual_size());
  int surplus_at = x.size() - p.surplus_count();
  for (int i = p.d - 1; i >= p.k - 1; --i) {
    const auto& lvl = p.level(i);
    if (lvl.functionals.empty()) continue;
    const auto plus = flag.plus_side(i);
    const int slot = p.pi_of(i);
    const int offset = p.block_offset(slot);
    for (std::size_t j = 0; j < lvl.functionals.size(); ++j) {
      const auto& f = lvl.functionals[j];
      if (f.is_zero_functional()) continue;
      const double g = gap(masses::assign(f, plus.carrier), plus);
      if (static_cast<int>(j) < slot) {
        x(offset + static_cast<int>(j)) = g;
      } else {
        x(surplus_at++) = g;
      }
    }
  }
  return x;
}

Vec evaluate_F_pi(const FairyProblem& p, const geom::Frame& frame) {
  return residual_of_flag(p, flag_from_frame(p, frame));
}

FairySolution solve_fairy(const FairyProblem& problem, const SolverConfig& cfg) {
  const FairyProblem p = prepare(problem, cfg);
  p.validate();
  const int m = p.frame_size();
  const auto space = stiefel::frame_space(p.d, m);
  search::ResidualFn<stiefel::FrameState> f = [&p](const stiefel::FrameState& s) {
    return evaluate_F_pi(p, s.frame());
  };
  const auto out = search::find_zero(space, f, cfg);
  FairySolution sol;
  if (out.best_start < 0) throw Error(ErrorCode::ZeroMass, "no feasible start frame found");
  sol.frame = out.best.frame();
  sol.flag = flag_from_frame(p, sol.frame);
  sol.residual = out.residual;
  sol.residual_norm = out.residual_norm;
  sol.converged = out.converged;
  sol.effective_target = out.effective_target;
  sol.best_start = out.best_start;
  sol.evaluations = out.evaluations;
  return sol;
}

RotationInstance rotation_instance(int d, int k) {
  if (k < 1 || k > d) throw Error(ErrorCode::InvalidArgument, "need 1 <= k <= d");
  RotationInstance inst;
  for (int i = d - 1; i >= k; --i) inst.pi.push_back(i - 1);
  inst.pi.push_back(d - 1);
  for (int i = d - 1; i >= k; --i) {
    std::vector<MassAssignment> balls;
    balls.push_back(MassAssignment::ball_section(i + 1, Vec::Zero(d), 1.0));
    for (int j = 1; j < k; ++j) balls.push_back(MassAssignment::ball_section(i + 1, Vec::Unit(d, d - j), 1.0));
    inst.level_balls.push_back(std::move(balls));
  }
  return inst;
}

FairyProblem rotation_problem(int d, int k, const MassAssignment& mu, const std::vector<MassAssignment>& fs) {
  if (static_cast<int>(fs.size()) != d - 1) throw Error(ErrorCode::InvalidArgument, "rotation case needs d-1 functionals");
  const auto inst = rotation_instance(d, k);
  FairyProblem p;
  p.d = d;
  p.k = k;
  p.pi = inst.pi;
  for (int i = d - 1; i >= k; --i) {
    const auto& balls = inst.level_balls[static_cast<std::size_t>(d - 1 - i)];
    FairyLevel lvl{balls.front(), {}};
    for (std::size_t j = 1; j < balls.size(); ++j) lvl.functionals.push_back(balls[j]);
    while (static_cast<int>(lvl.functionals.size()) < i - 1) lvl.functionals.push_back(MassAssignment::zero(i + 1, d));
    p.levels.push_back(std::move(lvl));
  }
  p.levels.push_back(FairyLevel{mu, fs});
  p.validate();
  return p;
}

RotationSolution solve_rotation(int d, int k, const MassAssignment& mu, const std::vector<MassAssignment>& fs,
                                const SolverConfig& cfg) {
  const auto p = rotation_problem(d, k, mu, fs);
  RotationSolution out;
  out.fairy = solve_fairy(p, cfg);
  out.s_k = k == d ? geom::Flat::whole_space(d) : out.fairy.flag.at_dim(k).flat;
  out.s_k_minus_1 = out.fairy.flag.at_dim(k - 1).flat;
  out.vertical = geom::is_k_vertical(out.s_k, k - 1, 1e-6);
  out.through_origin = out.s_k.contains(Vec::Zero(d), 1e-6);
  out.converged = out.fairy.converged && out.vertical && out.through_origin;
  return out;
}

std::vector<MassAssignment> lemma24_instance(int d, int k) {
  if (k < 1 || k > d) throw Error(ErrorCode::InvalidArgument, "need 1 <= k <= d");
  std::vector<MassAssignment> out;
  out.push_back(MassAssignment::projected_ball(k, Vec::Zero(d), 1.0));
  for (int i = 0; i < d; ++i) out.push_back(MassAssignment::projected_ball(k, Vec::Unit(d, i), 1.0));
  return out;
}

FairyProblem oversubscribed_problem(int d, int k, const std::vector<MassAssignment>& assignments) {
  if (k < 1 || k > d) throw Error(ErrorCode::InvalidArgument, "need 1 <= k <= d");
  if (assignments.size() < 2) throw Error(ErrorCode::InvalidArgument, "need a pivot and at least one functional");
  FairyProblem p;
  p.d = d;
  p.k = k;
  p.allow_surplus = true;
  p.pi = rotation_instance(d, k).pi;
  for (int i = d - 1; i >= k; --i) {
    FairyLevel lvl{MassAssignment::ball_section(i + 1, Vec::Zero(d), 1.0), {}};
    while (static_cast<int>(lvl.functionals.size()) < i - 1) lvl.functionals.push_back(MassAssignment::zero(i + 1, d));
    p.levels.push_back(std::move(lvl));
  }
  p.levels.push_back(FairyLevel{assignments.front(), std::vector<MassAssignment>(assignments.begin() + 1, assignments.end())});
  p.validate();
  return p;
}

FairyProblem lemma24_problem(int d, int k) { return oversubscribed_problem(d, k, lemma24_instance(d, k)); }

}  // namespace masspart::flagsolve

#pragma once

#include <string>
#include <vector>

#include "masspart/geom.hpp"
#include "masspart/masses.hpp"
#include "masspart/search.hpp"

namespace masspart::flagsolve {

using masses::MassAssignment;
using search::SolverConfig;

/// Constraints on one level S_i of S_{i+1}: the pivot fixes the cut offset,
/// the functionals are what the cut must also bisect.
struct FairyLevel {
  MassAssignment pivot;                     // dimension i + 1
  std::vector<MassAssignment> functionals;  // dimension i + 1, at most pi_i (more only as surplus)
};

/// Flag problem for a permutation pi = (pi_{d-1}, ..., pi_{k-1}) of (d-1, ..., k-1).
/// levels[0] describes S_{d-1}, levels.back() describes S_{k-1}.
struct FairyProblem {
  int d = 0;
  int k = 1;
  std::vector<int> pi;
  std::vector<FairyLevel> levels;
  /// Lets a level carry more than pi_i functionals; the excess is appended to
  /// the residual after the standard layout. Only meant for negative instances.
  bool allow_surplus = false;

  /// Throws InvalidArgument / DimensionMismatch.
  void validate() const;
  int frame_size() const { return d - k + 1; }
  const FairyLevel& level(int i) const { return levels[static_cast<std::size_t>(d - 1 - i)]; }
  int pi_of(int i) const { return pi[static_cast<std::size_t>(d - 1 - i)]; }
  /// Frame column holding v_j (frame order is v_{d-1}, ..., v_{k-1}).
  int column_of(int j) const { return d - 1 - j; }
  /// (d-1) + ... + (k-1) plus any surplus entries.
  int residual_size() const;
  /// Offset of block x_j inside the stacked residual (x_{d-1}, ..., x_{k-1}).
  int block_offset(int j) const;
  int surplus_count() const;
};

struct FairySolution {
  geom::Frame frame = geom::Frame::standard(1, 1);
  geom::Flag flag;
  Vec residual;
  double residual_norm = 0.0;
  bool converged = false;
  double effective_target = 0.0;
  int best_start = -1;
  long evaluations = 0;
};

/// Mollifies a discrete assignment per cfg (explicit cfg.mollify, or
/// 1e-3 x data diameter when requires_continuity); other kinds pass through.
MassAssignment prepared(const MassAssignment& a, const SolverConfig& cfg);

/// Copies the problem with every assignment passed through `prepared`.
FairyProblem prepare(const FairyProblem& p, const SolverConfig& cfg);

/// Builds the flag from arbitrary (not necessarily orthonormal) direction vectors,
/// one per frame column. Throws DegenerateDirection / ZeroMass.
geom::Flag flag_from_directions(const FairyProblem& p, const Mat& directions);
geom::Flag flag_from_frame(const FairyProblem& p, const geom::Frame& frame);

/// The equivariant map: block x_{pi_i} holds f(S_i^+) - f(S_i^-) for the functionals of level i.
Vec evaluate_F_pi(const FairyProblem& p, const geom::Frame& frame);
/// Same, from a flag that was already built.
Vec residual_of_flag(const FairyProblem& p, const geom::Flag& flag);

/// Multi-start search for a zero of evaluate_F_pi over V_{d-k+1}(R^d). The
/// problem is prepared (mollified) per cfg first.
FairySolution solve_fairy(const FairyProblem& p, const SolverConfig& cfg);

/// Ball constraints of the rotation construction: for each level i = d-1 down to k,
/// unit balls at the origin and at e_d, e_{d-1}, ..., e_{d-k+2}.
struct RotationInstance {
  std::vector<int> pi;                                  // (d-2, ..., k-1, d-1)
  std::vector<std::vector<MassAssignment>> level_balls;  // front = level d-1
};
RotationInstance rotation_instance(int d, int k);

/// Fairy problem for the rotation case: mu (dim k) and d-1 functionals (dim k)
/// on the last level, ball constraints above it.
FairyProblem rotation_problem(int d, int k, const MassAssignment& mu, const std::vector<MassAssignment>& fs);

struct RotationSolution {
  geom::Flat s_k = geom::Flat::point(Vec::Zero(1));
  geom::Flat s_k_minus_1 = geom::Flat::point(Vec::Zero(1));
  FairySolution fairy;
  bool vertical = false;        // S_k is (k-1)-vertical within 1e-6
  bool through_origin = false;  // within 1e-6
  bool converged = false;
};
RotationSolution solve_rotation(int d, int k, const MassAssignment& mu, const std::vector<MassAssignment>& fs,
                                const SolverConfig& cfg);

/// d+1 projected unit-ball assignments of dimension k centered at the origin and e_1, ..., e_d.
std::vector<MassAssignment> lemma24_instance(int d, int k);

/// All of `assignments` (dimension k) bisected by S_{k-1} inside S_k: the first
/// is the pivot of the last level, the rest its functionals. Upper levels pass
/// through the origin.
FairyProblem oversubscribed_problem(int d, int k, const std::vector<MassAssignment>& assignments);

/// The lemma24 assignments as an over-subscribed flag problem: all d+1 must be
/// bisected on S_k, which is one more than any permutation allows.
FairyProblem lemma24_problem(int d, int k);

}  // namespace masspart::flagsolve

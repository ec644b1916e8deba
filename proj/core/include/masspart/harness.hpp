#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "masspart/flagsolve.hpp"
#include "masspart/geom.hpp"
#include "masspart/kinetic.hpp"
#include "masspart/masses.hpp"
#include "masspart/search.hpp"
#include "masspart/transversal.hpp"

namespace masspart::harness {

using masses::MassAssignment;
using search::SolverConfig;

inline constexpr int format_version = 1;

enum class Kind { Fairy, Rotation, Transversal, Horizontal, Dynamic, TranslatedLine, HamSandwich };

std::string_view to_string(Kind kind);
/// Throws InvalidArgument.
Kind kind_from_string(std::string_view name);

/// One problem document. Only the members of the instance's kind are used.
struct Instance {
  Kind kind = Kind::Fairy;
  std::string name;
  int d = 0;
  int k = 0;
  int lambda = 0;
  std::vector<int> pi;
  /// Fairy only.
  std::vector<flagsolve::FairyLevel> levels;
  bool allow_surplus = false;
  /// Rotation: mu plus d - 1 functionals in `assignments`. Transversal: the
  /// assignments. HamSandwich: d + 1 assignments, the first one is the pivot.
  std::optional<MassAssignment> mu;
  std::vector<MassAssignment> assignments;
  std::vector<kinetic::LineFamilyMeasure> lines;
  std::vector<kinetic::MovingFamily> moving;
  std::vector<kinetic::HyperplaneFamilyMeasure> planes;
  SolverConfig config;

  /// Arity and dimension checks per kind. Throws InvalidArgument / DimensionMismatch.
  void validate() const;
  flagsolve::FairyProblem fairy_problem() const;
  transversal::TransversalProblem transversal_problem() const;
};

/// Solver output in a kind-neutral form. verify reads only the geometric
/// fields (flag, s_k, l, v, param, pivot, boundary); residual fields are informational.
struct Solution {
  Kind kind = Kind::Fairy;
  bool converged = false;
  Vec residual;
  double residual_norm = 0.0;
  double effective_target = 0.0;
  // Fairy / Rotation / HamSandwich
  std::optional<geom::Frame> frame;
  std::optional<geom::Flag> flag;
  // Transversal
  std::optional<geom::Flat> s_k;
  std::optional<geom::Flat> l;
  // Kinetic
  Vec v;
  double tau = 0.0;
  double param = 0.0;
  double pivot = 0.0;
  bool boundary = false;
  std::vector<double> median_speeds;
  std::vector<int> dropped;
  std::vector<std::string> warnings;
};

struct OracleResult {
  std::string mode;  // "global" or "local"
  int resolution = 0;
  int dof = 0;
  long evaluations = 0;
  double grid_min = 0.0;
  Vec grid_argmin;
  /// After the local refinement pass.
  double min_residual = 0.0;
  Vec argmin;
};

struct SideMasses {
  std::string label;
  double plus = 0.0;
  double minus = 0.0;
};

struct Report {
  Kind kind = Kind::Fairy;
  Solution solution;
  Vec residual;
  double residual_norm = 0.0;
  double target = 0.0;
  std::vector<SideMasses> masses;
  /// Named geometric conditions (vertical, through_origin, nested, ...).
  std::vector<std::pair<std::string, bool>> checks;
  std::optional<OracleResult> oracle;
  /// max(0, residual_norm - oracle min): how much better the oracle did.
  double oracle_gap = 0.0;
  bool pass = false;
  double wall_time = 0.0;
  std::vector<int> dropped;
  std::vector<std::string> warnings;
};

// I/O. Parse errors throw InvalidArgument; missing files throw InvalidArgument.
Instance parse_instance(const std::string& text);
std::string dump_instance(const Instance& inst);
Instance load_instance(const std::string& path);
void save_text(const std::string& path, const std::string& text);
std::string load_text(const std::string& path);

/// Throws MalformedSolution.
Solution parse_solution(const std::string& text);
std::string dump_solution(const Solution& sol);
std::string dump_oracle(const OracleResult& oracle);
/// Wall time is omitted when include_time is false (for byte comparisons).
std::string dump_report(const Report& report, bool include_time = true);

/// Runs the solver matching the instance kind.
Solution solve(const Instance& inst);

/// Search-space dimension used by the oracle for this instance.
int oracle_dof(const Instance& inst);

/// Uniform grid over the solver's parametrization (frame angles, (v, tau), or
/// (angle, offset, point) for HamSandwich) plus one refinement pass from the
/// best cells. Throws SearchSpaceTooLarge when the dimension exceeds 4.
OracleResult grid_oracle(const Instance& inst, int resolution);

/// Grid of the given radius around a solution's frame or (v, tau).
OracleResult local_oracle(const Instance& inst, const Solution& sol, int resolution, double radius);

/// Recomputes every closed-side mass, depth and incidence condition from the
/// instance and the solution geometry. Throws MalformedSolution.
Report verify(const Instance& inst, const Solution& sol, const std::optional<OracleResult>& oracle = std::nullopt);

/// SVG scene. Throws UnsupportedDimension for d > 3.
std::string plot_svg(const Instance& inst, const Solution* sol);
void render_plot(const Instance& inst, const Solution* sol, const std::string& path);

/// Side-by-side panels of a dynamic instance at the given times.
std::string trajectory_svg(const std::vector<kinetic::MovingFamily>& families, const std::vector<double>& times);

/// Built-in instances: rotation d=3 k=2, the three moving points, lemma24 d=2.
Instance demo_rotation();
Instance demo_moving_points();
Instance demo_lemma24();

int run_cli(int argc, char** argv);

}  // namespace masspart::harness

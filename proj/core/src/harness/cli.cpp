#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "internal.hpp"

namespace masspart::harness {

namespace {

constexpr int exit_pass = 0;
constexpr int exit_usage = 1;
constexpr int exit_not_converged = 2;
constexpr int exit_verify = 3;

struct SolveOptions {
  std::string in;
  std::string out;
  std::string plot;
  std::optional<std::uint64_t> seed;
  std::optional<int> starts;
  std::optional<double> target;
  std::optional<double> mollify;
  int resolution = 64;
  bool no_oracle = false;
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    save_text(path, text);
  }
}

bool accepts(const std::string& command, Kind kind) {
  if (command == "fairy") return kind == Kind::Fairy || kind == Kind::HamSandwich;
  if (command == "hline") return kind == Kind::TranslatedLine;
  return command == to_string(kind);
}

int run_solver(const std::string& command, const SolveOptions& o) {
  Instance inst = load_instance(o.in);
  if (!accepts(command, inst.kind)) {
    std::cerr << "masspart " << command << ": instance kind is " << to_string(inst.kind) << "\n";
    return exit_usage;
  }
  if (o.seed) inst.config.seed = *o.seed;
  if (o.starts) inst.config.starts = *o.starts;
  if (o.target) inst.config.target = *o.target;
  if (o.mollify) inst.config.mollify = *o.mollify;
  inst.config.grid_resolution = o.resolution;

  const auto t0 = std::chrono::steady_clock::now();
  const Solution sol = solve(inst);
  std::optional<OracleResult> oracle;
  if (!o.no_oracle && oracle_dof(inst) <= 4) oracle = grid_oracle(inst, o.resolution);
  Report report = verify(inst, sol, oracle);
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::string svg;
  if (!o.plot.empty()) {
    try {
      svg = plot_svg(inst, &sol);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UnsupportedDimension) throw;
      report.warnings.push_back(e.what());
    }
  }
  emit(o.out, dump_report(report));
  if (!svg.empty()) save_text(o.plot, svg);
  if (!sol.converged) return exit_not_converged;
  return report.pass ? exit_pass : exit_verify;
}

std::string parity_text() {
  std::ostringstream s;
  char buf[128];
  for (int d = 1; d <= 4; ++d) {
    const Mat m = kinetic::parity_matrix(d, 0.5);
    s << "d = " << d << ", t = 0.5\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        std::snprintf(buf, sizeof buf, "%s%7.3f", j ? " " : "", m(i, j));
        s << buf;
      }
      s << "\n";
    }
    std::snprintf(buf, sizeof buf, "det = %.6f (closed form %.6f)\n\n", kinetic::parity_det_direct(d, 0.5),
                  kinetic::parity_det_closed(d, 0.5));
    s << buf;
  }
  return s.str();
}

int run_demo(const std::string& dir) {
  std::filesystem::create_directories(dir);
  auto path = [&dir](const char* name) { return (std::filesystem::path(dir) / name).string(); };

  const Instance rotation = demo_rotation();
  save_text(path("rotation.json"), dump_instance(rotation));
  const Solution rsol = solve(rotation);
  save_text(path("rotation_report.json"), dump_report(verify(rotation, rsol), false));
  save_text(path("rotation.svg"), plot_svg(rotation, &rsol));

  const Instance moving = demo_moving_points();
  save_text(path("moving_points.json"), dump_instance(moving));
  save_text(path("moving_points.svg"), trajectory_svg(kinetic::three_moving_points(), {0.0, 0.5, 1.0}));

  save_text(path("lemma24.json"), dump_instance(demo_lemma24()));
  save_text(path("parity.txt"), parity_text());
  std::cout << "wrote demo files to " << dir << "\n";
  return exit_pass;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Numerical mass partitions: solve, verify and brute-force check."};
  app.name("masspart");
  app.require_subcommand(1);

  SolveOptions so;
  std::vector<CLI::App*> solvers;
  for (const char* name : {"fairy", "rotation", "transversal", "horizontal", "dynamic", "hline"}) {
    auto* sub = app.add_subcommand(name, std::string("Solve a ") + name + " instance, verify and report");
    sub->add_option("--in", so.in, "Instance file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", so.out, "Report file (stdout if omitted)");
    sub->add_option("--plot", so.plot, "SVG output");
    sub->add_option("--seed", so.seed, "Override the instance seed");
    sub->add_option("--starts", so.starts, "Multistart count")->check(CLI::PositiveNumber);
    sub->add_option("--target", so.target, "Residual target")->check(CLI::PositiveNumber);
    sub->add_option("--resolution", so.resolution, "Oracle grid points per axis")->check(CLI::Range(2, 100000));
    sub->add_option("--mollify", so.mollify, "Gaussian smoothing scale for discrete inputs")
        ->check(CLI::NonNegativeNumber);
    sub->add_flag("--no-oracle", so.no_oracle, "Skip the grid oracle");
    solvers.push_back(sub);
  }

  std::string in, out, solution_path;
  int resolution = 64;
  bool local = false;
  double radius = 0.05;
  auto* oracle = app.add_subcommand("oracle", "Brute-force grid minimum of the residual");
  oracle->add_option("--in", in, "Instance file")->required()->check(CLI::ExistingFile);
  oracle->add_option("--out", out, "Result file (stdout if omitted)");
  oracle->add_option("--resolution", resolution, "Grid points per axis")->check(CLI::Range(2, 100000));
  oracle->add_flag("--local", local, "Search around a solution instead of globally");
  oracle->add_option("--solution", solution_path, "Solution or report file (with --local)")->check(CLI::ExistingFile);
  oracle->add_option("--radius", radius, "Half-width of the local grid")->check(CLI::PositiveNumber);

  auto* ver = app.add_subcommand("verify", "Recompute every condition of a solution");
  ver->add_option("--in", in, "Instance file")->required()->check(CLI::ExistingFile);
  ver->add_option("--solution", solution_path, "Solution or report file")->required()->check(CLI::ExistingFile);
  ver->add_option("--out", out, "Report file (stdout if omitted)");

  std::string demo_dir = "demo";
  auto* demo = app.add_subcommand("demo", "Write the built-in instances, plots and parity matrices");
  demo->add_option("--out", demo_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    for (auto* sub : solvers) {
      if (sub->parsed()) return run_solver(sub->get_name(), so);
    }
    if (oracle->parsed()) {
      const Instance inst = load_instance(in);
      if (local) {
        if (solution_path.empty()) {
          std::cerr << "masspart oracle: --local needs --solution\n";
          return exit_usage;
        }
        emit(out, dump_oracle(local_oracle(inst, parse_solution(load_text(solution_path)), resolution, radius)));
      } else {
        emit(out, dump_oracle(grid_oracle(inst, resolution)));
      }
      return exit_pass;
    }
    if (ver->parsed()) {
      const Instance inst = load_instance(in);
      Solution sol;
      try {
        sol = parse_solution(load_text(solution_path));
        const auto t0 = std::chrono::steady_clock::now();
        Report r = verify(inst, sol);
        r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        emit(out, dump_report(r));
        return r.pass ? exit_pass : exit_verify;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::MalformedSolution) throw;
        std::cerr << "masspart verify: " << e.what() << "\n";
        return exit_verify;
      }
    }
    if (demo->parsed()) return run_demo(demo_dir);
  } catch (const Error& e) {
    std::cerr << "masspart: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "masspart: " << e.what() << "\n";
    return exit_usage;
  }
  return exit_usage;
}

}  // namespace masspart::harness

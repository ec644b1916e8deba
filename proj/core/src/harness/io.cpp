#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "masspart/harness.hpp"

namespace masspart::harness {

using json = nlohmann::json;

namespace {

constexpr std::pair<Kind, std::string_view> kind_names[] = {
    {Kind::Fairy, "fairy"},           {Kind::Rotation, "rotation"},
    {Kind::Transversal, "transversal"}, {Kind::Horizontal, "horizontal"},
    {Kind::Dynamic, "dynamic"},       {Kind::TranslatedLine, "translated-line"},
    {Kind::HamSandwich, "hamsandwich"},
};

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); }

const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

double number(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!j.is_number()) bad("expected a number");
  return j.get<double>();
}

json to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vec vec_from(const json& j) {
  if (!j.is_array()) bad("expected an array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i]);
  return v;
}

/// Columns as an array of vectors.
json columns_json(const Mat& m) {
  json a = json::array();
  for (Eigen::Index c = 0; c < m.cols(); ++c) a.push_back(to_json(m.col(c)));
  return a;
}

Mat columns_from(const json& j, Eigen::Index rows) {
  if (!j.is_array()) bad("expected an array of vectors");
  Mat m(rows, static_cast<Eigen::Index>(j.size()));
  for (std::size_t c = 0; c < j.size(); ++c) {
    const Vec v = vec_from(j[c]);
    if (v.size() != rows) bad("vectors have inconsistent lengths");
    m.col(static_cast<Eigen::Index>(c)) = v;
  }
  return m;
}

Eigen::Index first_length(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) bad("expected a non-empty array of vectors");
  return static_cast<Eigen::Index>(j[0].size());
}

double weight_of(const json& j) { return j.contains("weight") ? number(j.at("weight")) : 1.0; }

double sigma_of(const json& j) { return j.contains("sigma") ? number(j.at("sigma")) : 0.0; }

// ---------------------------------------------------------------------------
// Assignments and families

masses::Line line_from(const json& j) {
  return masses::Line{vec_from(need(j, "point")), vec_from(need(j, "direction")), weight_of(j)};
}

json line_json(const masses::Line& l) {
  return json{{"point", to_json(l.point)}, {"direction", to_json(l.direction)}, {"weight", l.weight}};
}

masses::Hyperplane hyperplane_from(const json& j) {
  return masses::Hyperplane{vec_from(need(j, "normal")), number(need(j, "offset")), weight_of(j)};
}

json hyperplane_json(const masses::Hyperplane& h) {
  return json{{"normal", to_json(h.normal)}, {"offset", h.offset}, {"weight", h.weight}};
}

MassAssignment assignment_from(const json& j) {
  const std::string type = need(j, "type").get<std::string>();
  MassAssignment a = MassAssignment::zero(1, 1);
  if (type == "cloud") {
    const auto& pts = need(j, "points");
    const Mat points = columns_from(pts, first_length(pts));
    Vec weights = j.contains("weights") ? vec_from(j.at("weights")) : Vec::Ones(points.cols());
    a = MassAssignment::projected_cloud(need(j, "dim").get<int>(), points, weights);
  } else if (type == "ball") {
    a = MassAssignment::projected_ball(need(j, "dim").get<int>(), vec_from(need(j, "center")), number(need(j, "radius")));
  } else if (type == "ball_section") {
    a = MassAssignment::ball_section(need(j, "dim").get<int>(), vec_from(need(j, "center")), number(need(j, "radius")));
  } else if (type == "lines") {
    std::vector<masses::Line> lines;
    for (const auto& l : need(j, "lines")) lines.push_back(line_from(l));
    a = MassAssignment::line_family(std::move(lines));
  } else if (type == "hyperplanes") {
    std::vector<masses::Hyperplane> hs;
    for (const auto& h : need(j, "hyperplanes")) hs.push_back(hyperplane_from(h));
    a = MassAssignment::hyperplane_family(std::move(hs));
  } else if (type == "zero") {
    return MassAssignment::zero(need(j, "dim").get<int>(), need(j, "ambient").get<int>());
  } else {
    bad("unknown assignment type '" + type + "'");
  }
  const double sigma = sigma_of(j);
  return sigma > 0.0 ? masses::mollify(a, sigma) : a;
}

json assignment_json(const MassAssignment& a) {
  json j;
  switch (a.kind()) {
    case masses::Kind::ProjectedCloud:
      j = json{{"type", "cloud"}, {"dim", a.dim()}, {"points", columns_json(a.points())}, {"weights", to_json(a.weights())}};
      break;
    case masses::Kind::ProjectedBall:
      j = json{{"type", "ball"}, {"dim", a.dim()}, {"center", to_json(a.center())}, {"radius", a.radius()}};
      break;
    case masses::Kind::BallSection:
      j = json{{"type", "ball_section"}, {"dim", a.dim()}, {"center", to_json(a.center())}, {"radius", a.radius()}};
      break;
    case masses::Kind::LineFamily: {
      json ls = json::array();
      for (const auto& l : a.lines()) ls.push_back(line_json(l));
      j = json{{"type", "lines"}, {"lines", ls}};
      break;
    }
    case masses::Kind::HyperplaneFamily: {
      json hs = json::array();
      for (const auto& h : a.hyperplanes()) hs.push_back(hyperplane_json(h));
      j = json{{"type", "hyperplanes"}, {"hyperplanes", hs}};
      break;
    }
    case masses::Kind::CustomHalfspaceFn:
      if (a.is_zero_functional()) return json{{"type", "zero"}, {"dim", a.dim()}, {"ambient", a.ambient_dim()}};
      throw Error(ErrorCode::UnsupportedKind, "custom functionals cannot be written to a file");
  }
  if (a.mollify_sigma() > 0.0) j["sigma"] = a.mollify_sigma();
  return j;
}

std::vector<MassAssignment> assignments_from(const json& j) {
  std::vector<MassAssignment> out;
  if (!j.is_array()) bad("expected an array of assignments");
  for (const auto& a : j) out.push_back(assignment_from(a));
  return out;
}

json assignments_json(const std::vector<MassAssignment>& as) {
  json a = json::array();
  for (const auto& x : as) a.push_back(assignment_json(x));
  return a;
}

SolverConfig config_from(const json& j) {
  SolverConfig c;
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("starts")) c.starts = j.at("starts").get<int>();
  if (j.contains("max_iters")) c.max_iters = j.at("max_iters").get<int>();
  if (j.contains("target")) c.target = number(j.at("target"));
  if (j.contains("grid_resolution")) c.grid_resolution = j.at("grid_resolution").get<int>();
  if (j.contains("mollify")) c.mollify = number(j.at("mollify"));
  return c;
}

json config_json(const SolverConfig& c) {
  return json{{"seed", c.seed},     {"starts", c.starts},
              {"max_iters", c.max_iters}, {"target", c.target},
              {"grid_resolution", c.grid_resolution}, {"mollify", c.mollify}};
}

json flat_json(const geom::Flat& f) { return json{{"base", to_json(f.base())}, {"basis", columns_json(f.basis())}}; }

geom::Flat flat_from(const json& j) {
  const Vec base = vec_from(need(j, "base"));
  return geom::Flat(base, columns_from(need(j, "basis"), base.size()));
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("not valid JSON: ") + e.what());
  }
}

void check_version(const json& j) {
  const int v = need(j, "version").get<int>();
  if (v != format_version) bad("unsupported format version " + std::to_string(v));
}

}  // namespace

std::string_view to_string(Kind kind) {
  for (const auto& [k, name] : kind_names) {
    if (k == kind) return name;
  }
  return "unknown";
}

Kind kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kind_names) {
    if (n == name) return k;
  }
  bad("unknown problem kind '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

Instance parse_instance(const std::string& text) {
  const json j = parse_text(text);
  try {
    check_version(j);
    Instance inst;
    inst.kind = kind_from_string(need(j, "kind").get<std::string>());
    if (j.contains("name")) inst.name = j.at("name").get<std::string>();
    inst.d = need(j, "d").get<int>();
    if (j.contains("k")) inst.k = j.at("k").get<int>();
    if (j.contains("lambda")) inst.lambda = j.at("lambda").get<int>();
    if (j.contains("config")) inst.config = config_from(j.at("config"));
    switch (inst.kind) {
      case Kind::Fairy:
        inst.pi = need(j, "pi").get<std::vector<int>>();
        if (j.contains("allow_surplus")) inst.allow_surplus = j.at("allow_surplus").get<bool>();
        for (const auto& lvl : need(j, "levels")) {
          inst.levels.push_back(
              flagsolve::FairyLevel{assignment_from(need(lvl, "pivot")), assignments_from(need(lvl, "functionals"))});
        }
        break;
      case Kind::Rotation:
        inst.mu = assignment_from(need(j, "mu"));
        inst.assignments = assignments_from(need(j, "functionals"));
        break;
      case Kind::Transversal:
      case Kind::HamSandwich:
        inst.assignments = assignments_from(need(j, "assignments"));
        break;
      case Kind::Horizontal:
        for (const auto& f : need(j, "families")) {
          kinetic::LineFamilyMeasure fam;
          fam.sigma = sigma_of(f);
          for (const auto& l : need(f, "lines")) fam.lines.push_back(line_from(l));
          inst.lines.push_back(std::move(fam));
        }
        break;
      case Kind::Dynamic:
        for (const auto& f : need(j, "families")) {
          kinetic::MovingFamily fam;
          fam.sigma = sigma_of(f);
          for (const auto& m : need(f, "points")) {
            fam.points.push_back({vec_from(need(m, "p")), vec_from(need(m, "w")), weight_of(m)});
          }
          inst.moving.push_back(std::move(fam));
        }
        break;
      case Kind::TranslatedLine:
        for (const auto& f : need(j, "families")) {
          kinetic::HyperplaneFamilyMeasure fam;
          fam.sigma = sigma_of(f);
          for (const auto& h : need(f, "hyperplanes")) fam.hyperplanes.push_back(hyperplane_from(h));
          inst.planes.push_back(std::move(fam));
        }
        break;
    }
    inst.validate();
    return inst;
  } catch (const json::exception& e) {
    bad(std::string("malformed instance: ") + e.what());
  }
}

std::string dump_instance(const Instance& inst) {
  json j{{"version", format_version}, {"kind", std::string(to_string(inst.kind))}, {"d", inst.d}};
  if (!inst.name.empty()) j["name"] = inst.name;
  j["config"] = config_json(inst.config);
  switch (inst.kind) {
    case Kind::Fairy: {
      j["k"] = inst.k;
      j["pi"] = inst.pi;
      if (inst.allow_surplus) j["allow_surplus"] = true;
      json levels = json::array();
      for (const auto& lvl : inst.levels) {
        levels.push_back(json{{"pivot", assignment_json(lvl.pivot)}, {"functionals", assignments_json(lvl.functionals)}});
      }
      j["levels"] = levels;
      break;
    }
    case Kind::Rotation:
      j["k"] = inst.k;
      j["mu"] = assignment_json(*inst.mu);
      j["functionals"] = assignments_json(inst.assignments);
      break;
    case Kind::Transversal:
      j["k"] = inst.k;
      j["lambda"] = inst.lambda;
      j["assignments"] = assignments_json(inst.assignments);
      break;
    case Kind::HamSandwich:
      j["k"] = inst.k;
      j["assignments"] = assignments_json(inst.assignments);
      break;
    case Kind::Horizontal: {
      json fams = json::array();
      for (const auto& f : inst.lines) {
        json ls = json::array();
        for (const auto& l : f.lines) ls.push_back(line_json(l));
        fams.push_back(json{{"sigma", f.sigma}, {"lines", ls}});
      }
      j["families"] = fams;
      break;
    }
    case Kind::Dynamic: {
      json fams = json::array();
      for (const auto& f : inst.moving) {
        json ps = json::array();
        for (const auto& m : f.points) ps.push_back(json{{"p", to_json(m.p)}, {"w", to_json(m.w)}, {"weight", m.weight}});
        fams.push_back(json{{"sigma", f.sigma}, {"points", ps}});
      }
      j["families"] = fams;
      break;
    }
    case Kind::TranslatedLine: {
      json fams = json::array();
      for (const auto& f : inst.planes) {
        json hs = json::array();
        for (const auto& h : f.hyperplanes) hs.push_back(hyperplane_json(h));
        fams.push_back(json{{"sigma", f.sigma}, {"hyperplanes", hs}});
      }
      j["families"] = fams;
      break;
    }
  }
  return j.dump(2) + "\n";
}

std::string load_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) bad("cannot write " + path);
  out << text;
  if (!out) bad("write failed: " + path);
}

Instance load_instance(const std::string& path) { return parse_instance(load_text(path)); }

// ---------------------------------------------------------------------------

namespace {

json solution_json(const Solution& s) {
  json j{{"kind", std::string(to_string(s.kind))},
         {"converged", s.converged},
         {"residual", to_json(s.residual)},
         {"residual_norm", s.residual_norm},
         {"effective_target", s.effective_target}};
  if (s.frame) j["frame"] = columns_json(s.frame->vectors());
  if (s.flag) {
    json levels = json::array();
    for (const auto& lvl : s.flag->levels()) {
      json l = flat_json(lvl.flat);
      l["normal"] = to_json(lvl.cut_normal);
      levels.push_back(l);
    }
    j["flag"] = levels;
  }
  if (s.s_k) j["s_k"] = flat_json(*s.s_k);
  if (s.l) j["l"] = flat_json(*s.l);
  if (s.v.size() > 0) {
    j["v"] = to_json(s.v);
    j["tau"] = s.tau;
    j["boundary"] = s.boundary;
    if (!s.boundary) {
      j["param"] = s.param;
      j["pivot"] = s.pivot;
    }
    json speeds = json::array();
    for (double m : s.median_speeds) speeds.push_back(std::isfinite(m) ? json(m) : json(nullptr));
    j["median_speeds"] = speeds;
  }
  if (!s.dropped.empty()) j["dropped"] = s.dropped;
  j["warnings"] = s.warnings;
  return j;
}

Solution solution_from(const json& j) {
  Solution s;
  s.kind = kind_from_string(need(j, "kind").get<std::string>());
  if (j.contains("converged")) s.converged = j.at("converged").get<bool>();
  if (j.contains("residual")) s.residual = vec_from(j.at("residual"));
  if (j.contains("residual_norm")) s.residual_norm = number(j.at("residual_norm"));
  if (j.contains("effective_target")) s.effective_target = number(j.at("effective_target"));
  if (j.contains("frame")) {
    const auto& f = j.at("frame");
    s.frame = geom::Frame(columns_from(f, first_length(f)));
  }
  if (j.contains("flag")) {
    std::vector<geom::FlagLevel> levels;
    for (const auto& l : j.at("flag")) levels.push_back(geom::FlagLevel{flat_from(l), vec_from(need(l, "normal"))});
    s.flag = geom::Flag(std::move(levels));
  }
  if (j.contains("s_k")) s.s_k = flat_from(j.at("s_k"));
  if (j.contains("l")) s.l = flat_from(j.at("l"));
  if (j.contains("v")) {
    s.v = vec_from(j.at("v"));
    if (j.contains("tau")) s.tau = number(j.at("tau"));
    s.boundary = j.contains("boundary") && j.at("boundary").get<bool>();
    if (!s.boundary) {
      s.param = number(need(j, "param"));
      s.pivot = number(need(j, "pivot"));
    }
    if (j.contains("median_speeds")) {
      for (const auto& m : j.at("median_speeds")) s.median_speeds.push_back(number(m));
    }
  }
  if (j.contains("dropped")) s.dropped = j.at("dropped").get<std::vector<int>>();
  if (j.contains("warnings")) s.warnings = j.at("warnings").get<std::vector<std::string>>();
  return s;
}

json oracle_json(const OracleResult& o) {
  return json{{"mode", o.mode},
              {"resolution", o.resolution},
              {"dof", o.dof},
              {"evaluations", o.evaluations},
              {"grid_min", o.grid_min},
              {"grid_argmin", to_json(o.grid_argmin)},
              {"min_residual", o.min_residual},
              {"argmin", to_json(o.argmin)}};
}

}  // namespace

Solution parse_solution(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedSolution, std::string("not valid JSON: ") + e.what());
  }
  try {
    check_version(j);
    // A report carries its solution under "solution".
    return solution_from(j.contains("solution") ? j.at("solution") : j);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedSolution, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::MalformedSolution) throw;
    throw Error(ErrorCode::MalformedSolution, e.what());
  }
}

std::string dump_solution(const Solution& sol) {
  json j = solution_json(sol);
  j["version"] = format_version;
  return j.dump(2) + "\n";
}

std::string dump_oracle(const OracleResult& o) {
  json j = oracle_json(o);
  j["version"] = format_version;
  return j.dump(2) + "\n";
}

std::string dump_report(const Report& r, bool include_time) {
  json masses = json::array();
  for (const auto& m : r.masses) masses.push_back(json{{"label", m.label}, {"plus", m.plus}, {"minus", m.minus}});
  json checks = json::object();
  for (const auto& [name, ok] : r.checks) checks[name] = ok;
  json j{{"version", format_version},
         {"kind", std::string(to_string(r.kind))},
         {"solution", solution_json(r.solution)},
         {"residual", to_json(r.residual)},
         {"residual_norm", r.residual_norm},
         {"target", r.target},
         {"masses", masses},
         {"checks", checks},
         {"oracle", r.oracle ? oracle_json(*r.oracle) : json(nullptr)},
         {"oracle_gap", r.oracle_gap},
         {"verdict", r.pass ? "pass" : "fail"},
         {"dropped", r.dropped},
         {"warnings", r.warnings}};
  if (include_time) j["wall_time_s"] = r.wall_time;
  return j.dump(2) + "\n";
}

}  // namespace masspart::harness

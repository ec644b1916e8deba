#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "internal.hpp"

namespace masspart::harness {

namespace {

constexpr double size = 480.0;
constexpr double margin = 20.0;
const char* const palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2"};

const char* color(std::size_t i) { return palette[i % (sizeof(palette) / sizeof(palette[0]))]; }

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string num(double x) { return fmt("%.3f", std::abs(x) < 5e-4 ? 0.0 : x); }

/// World to screen: 2-D directly, 3-D by a fixed oblique view.
class Canvas {
 public:
  Canvas(int d, double radius, double ox = 0.0, double width = size) : d_(d), r_(radius), ox_(ox), w_(width) {}

  std::pair<double, double> screen(const Vec& x) const {
    double a = x(0), b = d_ > 1 ? x(1) : 0.0;
    if (d_ == 3) {
      a = 0.866 * (x(0) - x(1));
      b = x(2) - 0.5 * (x(0) + x(1));
    }
    const double s = (w_ - 2.0 * margin) / (2.0 * r_);
    return {ox_ + w_ / 2.0 + s * a, size / 2.0 - s * b};
  }
  double scale() const { return (w_ - 2.0 * margin) / (2.0 * r_); }
  double radius() const { return r_; }

  void dot(const Vec& x, const char* fill, double rad = 2.5) {
    const auto [sx, sy] = screen(x);
    out_ += "<circle cx=\"" + num(sx) + "\" cy=\"" + num(sy) + "\" r=\"" + num(rad) + "\" fill=\"" + fill + "\"/>\n";
  }
  void circle(const Vec& c, double rad, const char* stroke) {
    const auto [sx, sy] = screen(c);
    out_ += "<circle cx=\"" + num(sx) + "\" cy=\"" + num(sy) + "\" r=\"" + num(rad * scale()) +
            "\" fill=\"none\" stroke=\"" + stroke + "\"/>\n";
  }
  void segment(const Vec& a, const Vec& b, const char* stroke, double width = 1.0) {
    const auto [ax, ay] = screen(a);
    const auto [bx, by] = screen(b);
    out_ += "<line x1=\"" + num(ax) + "\" y1=\"" + num(ay) + "\" x2=\"" + num(bx) + "\" y2=\"" + num(by) +
            "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) + "\"/>\n";
  }
  void polygon(const std::vector<Vec>& pts, const char* fill) {
    out_ += "<polygon points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto [sx, sy] = screen(pts[i]);
      out_ += (i ? " " : "") + num(sx) + "," + num(sy);
    }
    out_ += "\" fill=\"" + std::string(fill) + "\" fill-opacity=\"0.15\" stroke=\"" + fill + "\"/>\n";
  }
  void text(double x, double y, const std::string& s) {
    out_ += "<text x=\"" + num(ox_ + x) + "\" y=\"" + num(y) + "\" font-size=\"12\">" + s + "</text>\n";
  }
  /// Flats of dimension 0, 1 and 2 clipped to the view radius.
  void flat(const geom::Flat& f, const char* stroke, double width = 1.5) {
    const double r = 1.5 * r_;
    if (f.dim() == 0) {
      dot(f.base(), stroke, 4.0);
    } else if (f.dim() == 1) {
      segment(f.point_at(Vec::Constant(1, -r)), f.point_at(Vec::Constant(1, r)), stroke, width);
    } else if (f.dim() == 2 && d_ == 3) {
      polygon({f.point_at(Vec{{-r, -r}}), f.point_at(Vec{{r, -r}}), f.point_at(Vec{{r, r}}), f.point_at(Vec{{-r, r}})},
              stroke);
    }
  }
  const std::string& body() const { return out_; }

 private:
  int d_;
  double r_;
  double ox_;
  double w_;
  std::string out_;
};

std::string document(double width, const std::string& body) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(size) +
         "\" viewBox=\"0 0 " + num(width) + " " + num(size) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
         body + "</svg>\n";
}

void extend(double& r, const Vec& x) { r = std::max(r, x.norm()); }

double view_radius(const Instance& p) {
  double r = 1.0;
  auto take = [&r](const MassAssignment& a) {
    if (a.kind() == masses::Kind::ProjectedCloud) {
      for (Eigen::Index j = 0; j < a.points().cols(); ++j) extend(r, a.points().col(j));
    } else if (a.kind() == masses::Kind::ProjectedBall || a.kind() == masses::Kind::BallSection) {
      r = std::max(r, a.center().norm() + a.radius());
    }
  };
  for (const auto& l : p.levels) {
    take(l.pivot);
    for (const auto& f : l.functionals) take(f);
  }
  if (p.mu) take(*p.mu);
  for (const auto& a : p.assignments) take(a);
  for (const auto& f : p.lines) {
    for (const auto& l : f.lines) extend(r, l.point);
  }
  for (const auto& f : p.moving) {
    for (const auto& m : f.points) {
      extend(r, m.p);
      extend(r, m.p + m.w);
    }
  }
  for (const auto& f : p.planes) {
    for (const auto& h : f.hyperplanes) r = std::max(r, std::abs(h.offset));
  }
  return 1.1 * r;
}

void draw_assignment(Canvas& c, const MassAssignment& a, const char* col) {
  switch (a.kind()) {
    case masses::Kind::ProjectedCloud:
      for (Eigen::Index j = 0; j < a.points().cols(); ++j) c.dot(a.points().col(j), col);
      break;
    case masses::Kind::ProjectedBall:
    case masses::Kind::BallSection:
      c.circle(a.center(), a.radius(), col);
      break;
    case masses::Kind::LineFamily:
      for (const auto& l : a.lines()) c.flat(geom::Flat::through(l.point, Mat(l.direction)), col, 0.7);
      break;
    default:
      break;
  }
}

void draw_moving(Canvas& c, const std::vector<kinetic::MovingFamily>& fams, double t) {
  for (std::size_t i = 0; i < fams.size(); ++i) {
    for (const auto& m : fams[i].points) c.dot(m.p + t * m.w, color(i), 3.5);
  }
}

}  // namespace

std::string plot_svg(const Instance& inst, const Solution* sol) {
  inst.validate();
  if (inst.d > 3) throw Error(ErrorCode::UnsupportedDimension, "plots need d <= 3");
  const int d = inst.d;
  Canvas c(d, view_radius(inst));
  std::size_t idx = 0;
  if (inst.mu) draw_assignment(c, *inst.mu, color(idx++));
  for (const auto& l : inst.levels) {
    draw_assignment(c, l.pivot, color(idx++));
    for (const auto& f : l.functionals) draw_assignment(c, f, color(idx++));
  }
  for (const auto& a : inst.assignments) draw_assignment(c, a, color(idx++));
  for (std::size_t i = 0; i < inst.lines.size(); ++i) {
    for (const auto& l : inst.lines[i].lines) c.flat(geom::Flat::through(l.point, Mat(l.direction)), color(i), 0.7);
  }
  const bool dynamic = inst.kind == Kind::Dynamic;
  double t = 0.0;
  if (dynamic && sol && !sol->boundary && std::isfinite(sol->param)) t = sol->param;
  if (dynamic) draw_moving(c, inst.moving, t);
  if (d == 2) {
    for (std::size_t i = 0; i < inst.planes.size(); ++i) {
      for (const auto& h : inst.planes[i].hyperplanes) {
        const Vec dir{{-h.normal(1), h.normal(0)}};
        c.flat(geom::Flat::through(h.offset * h.normal, Mat(dir)), color(i), 0.7);
      }
    }
  }

  if (sol) {
    if (sol->flag) {
      for (const auto& lvl : sol->flag->levels()) c.flat(lvl.flat, "black", 2.0);
    }
    if (sol->s_k) c.flat(*sol->s_k, "black", 2.0);
    if (sol->l) c.flat(*sol->l, "#444444", 3.0);
    if (sol->v.size() == d && !sol->boundary && std::isfinite(sol->param)) {
      const Vec v = sol->v;
      if (inst.kind == Kind::Horizontal || inst.kind == Kind::TranslatedLine) {
        const Vec ed = Vec::Unit(d, d - 1);
        Eigen::HouseholderQR<Mat> qr{Mat(v)};
        const Mat dirs = Mat(qr.householderQ()).rightCols(d - 1);
        const auto s = geom::Flat::through(sol->param * v, inst.kind == Kind::Horizontal ? dirs : Mat(ed));
        c.flat(s, "black", 2.0);
        c.dot(sol->param * v + sol->pivot * ed, "black", 4.0);
      } else if (dynamic) {
        Eigen::HouseholderQR<Mat> qr{Mat(v)};
        const Mat dirs = Mat(qr.householderQ()).rightCols(d - 1);
        c.flat(geom::Flat::through(sol->pivot * v, dirs), "black", 2.0);
        c.text(8.0, 16.0, "t = " + num(t));
      }
    }
    c.text(8.0, size - 8.0, "residual " + fmt("%.3e", sol->residual_norm));
  }
  return document(size, c.body());
}

void render_plot(const Instance& inst, const Solution* sol, const std::string& path) {
  save_text(path, plot_svg(inst, sol));
}

std::string trajectory_svg(const std::vector<kinetic::MovingFamily>& families, const std::vector<double>& times) {
  if (families.empty() || times.empty()) throw Error(ErrorCode::InvalidArgument, "need families and times");
  const int d = static_cast<int>(families.front().points.front().p.size());
  if (d > 3) throw Error(ErrorCode::UnsupportedDimension, "plots need d <= 3");
  double r = 1.0;
  for (const auto& f : families) {
    for (const auto& m : f.points) {
      for (double t : times) extend(r, m.p + t * m.w);
    }
  }
  const double panel = 300.0;
  std::string body;
  for (std::size_t i = 0; i < times.size(); ++i) {
    Canvas c(d, 1.1 * r, panel * static_cast<double>(i), panel);
    draw_moving(c, families, times[i]);
    c.text(8.0, 16.0, "t = " + num(times[i]));
    body += c.body();
  }
  return document(panel * static_cast<double>(times.size()), body);
}

}  // namespace masspart::harness

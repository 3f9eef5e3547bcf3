#include "exactmppi/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace exactmppi {

namespace {

struct Mapper {
  double x0, y0, x1, y1;  // world bounds
  double scale;
  double width() const { return (x1 - x0) * scale; }
  double height() const { return (y1 - y0) * scale; }
  double px(double x) const { return (x - x0) * scale; }
  double py(double y) const { return (y1 - y) * scale; }  // y flipped for SVG
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

void polygon_path(std::ostringstream& out, const Mapper& m, std::span<const Point2> pts,
                  const std::string& style) {
  out << "<polygon points=\"";
  for (Point2 p : pts) out << num(m.px(p.x)) << ',' << num(m.py(p.y)) << ' ';
  out << "\" " << style << "/>\n";
}

std::vector<Point2> posed(std::span<const Point2> body, const Pose2& q) {
  std::vector<Point2> out;
  double c = std::cos(q.theta), s = std::sin(q.theta);
  for (Point2 v : body) out.push_back({q.x + c * v.x - s * v.y, q.y + s * v.x + c * v.y});
  return out;
}

// Diverging blue (outside) to red (inside) map for signed distance.
std::string sd_color(double d, double span) {
  double t = std::clamp(d / span, -1.0, 1.0);
  int r, g, b;
  if (t < 0.0) {  // inside: toward red
    r = 255;
    g = std::clamp(static_cast<int>(230 * (1 + t)), 0, 230);
    b = g;
  } else {  // outside: toward blue
    b = 255;
    r = std::clamp(static_cast<int>(230 * (1 - t)), 0, 230);
    g = r;
  }
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

std::string scenario_svg(const Scenario& scenario, const EpisodeResult* result,
                         double outline_interval) {
  double x0 = scenario.start.x, x1 = scenario.start.x;
  double y0 = scenario.start.y, y1 = scenario.start.y;
  auto grow = [&](Point2 p) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  };
  grow({scenario.goal.x, scenario.goal.y});
  for (Point2 p : scenario.guidance) grow(p);
  for (const auto& obs : scenario.obstacles) {
    if (std::holds_alternative<PolygonFootprint>(obs.shape)) {
      for (Point2 p : std::get<PolygonFootprint>(obs.shape).vertices()) grow(p);
    } else {
      const auto& d = std::get<Disc>(obs.shape);
      grow({d.center.x - d.radius, d.center.y - d.radius});
      grow({d.center.x + d.radius, d.center.y + d.radius});
    }
  }
  double margin = 1.5;
  Mapper m{x0 - margin, y0 - margin, x1 + margin, y1 + margin, 40.0};

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(m.width()) << "\" height=\""
      << num(m.height()) << "\" viewBox=\"0 0 " << num(m.width()) << ' ' << num(m.height())
      << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (const auto& obs : scenario.obstacles) {
    if (std::holds_alternative<PolygonFootprint>(obs.shape)) {
      polygon_path(out, m, std::get<PolygonFootprint>(obs.shape).vertices(),
                   "fill=\"#555555\" stroke=\"#222222\"");
    } else {
      const auto& d = std::get<Disc>(obs.shape);
      out << "<circle cx=\"" << num(m.px(d.center.x)) << "\" cy=\"" << num(m.py(d.center.y))
          << "\" r=\"" << num(d.radius * m.scale) << "\" fill=\"#555555\" stroke=\"#222222\"/>\n";
    }
  }

  if (!scenario.guidance.empty()) {
    out << "<polyline points=\"";
    for (Point2 p : scenario.guidance) out << num(m.px(p.x)) << ',' << num(m.py(p.y)) << ' ';
    out << "\" fill=\"none\" stroke=\"#2a9d2a\" stroke-width=\"2\" stroke-dasharray=\"6,4\"/>\n";
  }

  if (result && !result->trajectory.empty()) {
    out << "<polyline points=\"";
    for (const auto& row : result->trajectory)
      out << num(m.px(row.pose.x)) << ',' << num(m.py(row.pose.y)) << ' ';
    out << "\" fill=\"none\" stroke=\"#1855c0\" stroke-width=\"2\"/>\n";

    auto body_outlines = scenario.footprint.outlines();
    double next_t = 0.0;
    for (const auto& row : result->trajectory) {
      if (row.t + 1e-9 < next_t) continue;
      next_t = row.t + outline_interval;
      for (const auto& outline : body_outlines)
        polygon_path(out, m, posed(outline, row.pose),
                     "fill=\"none\" stroke=\"#d06018\" stroke-width=\"1\" opacity=\"0.7\"");
    }
  }

  out << "<circle cx=\"" << num(m.px(scenario.start.x)) << "\" cy=\"" << num(m.py(scenario.start.y))
      << "\" r=\"4\" fill=\"#1855c0\"/>\n";
  out << "<circle cx=\"" << num(m.px(scenario.goal.x)) << "\" cy=\"" << num(m.py(scenario.goal.y))
      << "\" r=\"5\" fill=\"none\" stroke=\"#2a9d2a\" stroke-width=\"2\"/>\n";
  out << "</svg>\n";
  return out.str();
}

std::string sdf_svg(const FootprintSpec& footprint, const SdfGrid& grid) {
  const double cell = 600.0 / static_cast<double>(std::max(grid.nx, grid.ny));
  const double w = cell * static_cast<double>(grid.nx);
  const double h = cell * static_cast<double>(grid.ny);

  double span = 1e-9;
  for (double v : grid.values) span = std::max(span, std::abs(v));

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
      << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\">\n";
  for (std::size_t iy = 0; iy < grid.ny; ++iy) {
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      double v = grid.values[iy * grid.nx + ix];
      // SVG y runs downward; grid rows run upward.
      double px = static_cast<double>(ix) * cell;
      double py = static_cast<double>(grid.ny - 1 - iy) * cell;
      out << "<rect x=\"" << num(px) << "\" y=\"" << num(py) << "\" width=\"" << num(cell + 0.5)
          << "\" height=\"" << num(cell + 0.5) << "\" fill=\"" << sd_color(v, span) << "\"/>\n";
    }
  }

  // Zero level set by marching-squares edge interpolation.
  auto to_px = [&](double gx, double gy) {
    return Point2{gx * cell + cell / 2, (static_cast<double>(grid.ny - 1) - gy) * cell + cell / 2};
  };
  out << "<g stroke=\"black\" stroke-width=\"2\">\n";
  for (std::size_t iy = 0; iy + 1 < grid.ny; ++iy) {
    for (std::size_t ix = 0; ix + 1 < grid.nx; ++ix) {
      double v00 = grid.values[iy * grid.nx + ix];
      double v10 = grid.values[iy * grid.nx + ix + 1];
      double v01 = grid.values[(iy + 1) * grid.nx + ix];
      double v11 = grid.values[(iy + 1) * grid.nx + ix + 1];
      std::vector<Point2> crossings;
      auto edge = [&](double a, double b, double ax, double ay, double bx, double by) {
        if ((a < 0.0) == (b < 0.0)) return;
        double t = a / (a - b);
        crossings.push_back(to_px(ax + t * (bx - ax), ay + t * (by - ay)));
      };
      double x = static_cast<double>(ix), y = static_cast<double>(iy);
      edge(v00, v10, x, y, x + 1, y);
      edge(v10, v11, x + 1, y, x + 1, y + 1);
      edge(v11, v01, x + 1, y + 1, x, y + 1);
      edge(v01, v00, x, y + 1, x, y);
      if (crossings.size() >= 2) {
        for (std::size_t i = 0; i + 1 < crossings.size(); i += 2) {
          out << "<line x1=\"" << num(crossings[i].x) << "\" y1=\"" << num(crossings[i].y)
              << "\" x2=\"" << num(crossings[i + 1].x) << "\" y2=\"" << num(crossings[i + 1].y)
              << "\"/>\n";
        }
      }
    }
  }
  out << "</g>\n";

  // Footprint outline for reference.
  out << "<g fill=\"none\" stroke=\"#104010\" stroke-width=\"1.5\" stroke-dasharray=\"4,3\">\n";
  for (const auto& outline : footprint.outlines()) {
    out << "<polygon points=\"";
    for (Point2 p : outline) {
      double gx = (p.x - grid.bounds.min.x) / grid.resolution - 0.5;
      double gy = (p.y - grid.bounds.min.y) / grid.resolution - 0.5;
      Point2 q = to_px(gx, gy);
      out << num(q.x) << ',' << num(q.y) << ' ';
    }
    out << "\"/>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

}  // namespace exactmppi

#include "exactmppi/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace exactmppi {

double norm(Point2 p) { return std::sqrt(p.x * p.x + p.y * p.y); }
double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }

double wrap_angle(double a) {
  const double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

namespace {

bool finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

int orientation_sign(Point2 a, Point2 b, Point2 c) {
  double v = cross(b - a, c - a);
  if (v > 0.0) return 1;
  if (v < 0.0) return -1;
  return 0;
}

bool on_segment(Point2 a, Point2 b, Point2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

}  // namespace

bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
  int o1 = orientation_sign(a, b, c);
  int o2 = orientation_sign(a, b, d);
  int o3 = orientation_sign(c, d, a);
  int o4 = orientation_sign(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

double signed_area2(std::span<const Point2> vertices) {
  double area2 = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    Point2 a = vertices[i];
    Point2 b = vertices[(i + 1) % vertices.size()];
    area2 += cross(a, b);
  }
  return area2;
}

RectangleCover RectangleCover::make(std::vector<AxisRectangle> rects) {
  if (rects.empty()) throw std::invalid_argument("rectangle cover must be nonempty");
  for (const auto& r : rects) {
    if (!finite(r.center) || !finite(r.half_extent))
      throw std::invalid_argument("rectangle cover has non-finite entries");
    if (r.half_extent.x <= 0.0 || r.half_extent.y <= 0.0)
      throw std::invalid_argument("rectangle half-extents must be strictly positive");
  }
  RectangleCover cover;
  cover.rectangles = std::move(rects);
  return cover;
}

PolygonFootprint PolygonFootprint::make(std::vector<Point2> vertices) {
  if (vertices.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
  for (Point2 v : vertices)
    if (!finite(v)) throw std::invalid_argument("polygon has non-finite vertex");

  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    Point2 a = vertices[i];
    Point2 b = vertices[(i + 1) % n];
    if (norm(b - a) == 0.0) throw std::invalid_argument("polygon has a zero-length edge");
  }

  // Pairwise non-adjacent edge intersection test.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(vertices[i], vertices[(i + 1) % n], vertices[j],
                             vertices[(j + 1) % n]))
        throw std::invalid_argument("polygon boundary self-intersects");
    }
  }

  if (signed_area2(vertices) < 0.0) {
    std::cerr << "[exactmppi] warning: polygon given clockwise, reversing to CCW\n";
    std::reverse(vertices.begin(), vertices.end());
  }

  PolygonFootprint poly;
  poly.vertices_ = std::move(vertices);
  return poly;
}

std::vector<Point2> FootprintSpec::all_vertices() const {
  std::vector<Point2> out;
  if (is_polygon()) {
    out = polygon().vertices();
  } else {
    for (const auto& r : cover().rectangles) {
      out.push_back({r.center.x - r.half_extent.x, r.center.y - r.half_extent.y});
      out.push_back({r.center.x + r.half_extent.x, r.center.y - r.half_extent.y});
      out.push_back({r.center.x + r.half_extent.x, r.center.y + r.half_extent.y});
      out.push_back({r.center.x - r.half_extent.x, r.center.y + r.half_extent.y});
    }
  }
  return out;
}

double FootprintSpec::bounding_radius() const {
  double r = 0.0;
  for (Point2 v : all_vertices()) r = std::max(r, norm(v));
  return r;
}

std::vector<std::vector<Point2>> FootprintSpec::outlines() const {
  std::vector<std::vector<Point2>> out;
  if (is_polygon()) {
    out.push_back(polygon().vertices());
  } else {
    for (const auto& r : cover().rectangles) {
      out.push_back({{r.center.x - r.half_extent.x, r.center.y - r.half_extent.y},
                     {r.center.x + r.half_extent.x, r.center.y - r.half_extent.y},
                     {r.center.x + r.half_extent.x, r.center.y + r.half_extent.y},
                     {r.center.x - r.half_extent.x, r.center.y + r.half_extent.y}});
    }
  }
  return out;
}

ObstacleSet ObstacleSet::padded(std::span<const Point2> valid_points, std::size_t capacity) {
  if (valid_points.size() > capacity)
    throw std::invalid_argument("more valid points than obstacle-set capacity");
  ObstacleSet set;
  set.points.assign(capacity, Point2{kPaddedCoordinate, kPaddedCoordinate});
  set.mask.assign(capacity, 0);
  for (std::size_t i = 0; i < valid_points.size(); ++i) {
    set.points[i] = valid_points[i];
    set.mask[i] = 1;
  }
  return set;
}

ObstacleSet ObstacleSet::all_masked(std::size_t capacity) {
  return padded(std::span<const Point2>{}, capacity);
}

std::size_t ObstacleSet::valid_count() const {
  std::size_t n = 0;
  for (auto m : mask) n += (m != 0);
  return n;
}

double sd_box(Point2 p, Point2 center, Point2 half_extent) {
  double ax = std::abs(p.x - center.x) - half_extent.x;
  double ay = std::abs(p.y - center.y) - half_extent.y;
  double ox = std::max(ax, 0.0);
  double oy = std::max(ay, 0.0);
  return std::sqrt(ox * ox + oy * oy) + std::min(std::max(ax, ay), 0.0);
}

double sd_rect_cover(Point2 p, const RectangleCover& cover) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& r : cover.rectangles) d = std::min(d, sd_box(p, r.center, r.half_extent));
  return d;
}

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  double ex = b.x - a.x;
  double ey = b.y - a.y;
  double len2 = ex * ex + ey * ey;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.x - a.x) * ex + (p.y - a.y) * ey) / len2, 0.0, 1.0);
  double dx = p.x - (a.x + t * ex);
  double dy = p.y - (a.y + t * ey);
  return std::sqrt(dx * dx + dy * dy);
}

bool point_in_polygon(Point2 p, std::span<const Point2> vertices) {
  bool inside = false;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    Point2 a = vertices[i];
    Point2 b = vertices[(i + 1) % n];
    if ((a.y < p.y) != (b.y < p.y)) {
      double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (x_cross > p.x) inside = !inside;
    }
  }
  return inside;
}

bool point_in_polygon(Point2 p, const PolygonFootprint& poly) {
  return point_in_polygon(p, poly.vertices());
}

double sd_polygon(Point2 p, std::span<const Point2> vertices) {
  double d = std::numeric_limits<double>::infinity();
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i)
    d = std::min(d, point_segment_distance(p, vertices[i], vertices[(i + 1) % n]));
  if (d < kBoundaryEpsilon) return 0.0;
  return point_in_polygon(p, vertices) ? -d : d;
}

double sd_polygon(Point2 p, const PolygonFootprint& poly) { return sd_polygon(p, poly.vertices()); }

double signed_distance(Point2 p, const FootprintSpec& footprint) {
  if (footprint.is_polygon()) return sd_polygon(p, footprint.polygon());
  return sd_rect_cover(p, footprint.cover());
}

PreparedFootprint prepare(const FootprintSpec& footprint) {
  PreparedFootprint f;
  f.bounding_radius = footprint.bounding_radius();
  if (footprint.is_polygon()) {
    f.kind = PreparedFootprint::Kind::kPolygon;
    const auto& verts = footprint.polygon().vertices();
    const std::size_t n = verts.size();
    f.vx.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      Point2 a = verts[i];
      Point2 b = verts[(i + 1) % n];
      f.vx.push_back(a.x);
      f.vy.push_back(a.y);
      f.ex.push_back(b.x - a.x);
      f.ey.push_back(b.y - a.y);
      double len2 = (b.x - a.x) * (b.x - a.x) + (b.y - a.y) * (b.y - a.y);
      f.inv_len2.push_back(1.0 / len2);
    }
  } else {
    f.kind = PreparedFootprint::Kind::kRectCover;
    for (const auto& r : footprint.cover().rectangles) {
      f.cx.push_back(r.center.x);
      f.cy.push_back(r.center.y);
      f.hx.push_back(r.half_extent.x);
      f.hy.push_back(r.half_extent.y);
    }
  }
  return f;
}

double PreparedFootprint::sd(Point2 p) const {
  if (kind == Kind::kRectCover) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < cx.size(); ++j) {
      double ax = std::abs(p.x - cx[j]) - hx[j];
      double ay = std::abs(p.y - cy[j]) - hy[j];
      double ox = ax > 0.0 ? ax : 0.0;
      double oy = ay > 0.0 ? ay : 0.0;
      double inner = std::max(ax, ay);
      d = std::min(d, std::sqrt(ox * ox + oy * oy) + (inner < 0.0 ? inner : 0.0));
    }
    return d;
  }
  // Single pass over edges: min squared distance and ray-cast parity.
  double d2 = std::numeric_limits<double>::infinity();
  bool inside = false;
  const std::size_t n = vx.size();
  for (std::size_t b = 0; b < n; ++b) {
    double rx = p.x - vx[b];
    double ry = p.y - vy[b];
    double t = (rx * ex[b] + ry * ey[b]) * inv_len2[b];
    t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
    double dx = rx - t * ex[b];
    double dy = ry - t * ey[b];
    double dist2 = dx * dx + dy * dy;
    if (dist2 < d2) d2 = dist2;
    double ay = vy[b];
    double by = vy[b] + ey[b];
    if ((ay < p.y) != (by < p.y)) {
      double x_cross = vx[b] + (p.y - ay) * ex[b] / ey[b];
      if (x_cross > p.x) inside = !inside;
    }
  }
  double d = std::sqrt(d2);
  if (d < kBoundaryEpsilon) return 0.0;
  return inside ? -d : d;
}

void batch_signed_distance(std::span<const Point2> queries, const PreparedFootprint& footprint,
                           std::span<double> out, int threads) {
  if (out.size() != queries.size()) throw std::invalid_argument("output span size mismatch");
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = footprint.sd(queries[i]);
  };
  if (threads <= 1 || queries.size() < 2048) {
    run(0, queries.size());
    return;
  }
  const std::size_t n = queries.size();
  const std::size_t workers = std::min<std::size_t>(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t begin = n * w / workers;
    std::size_t end = n * (w + 1) / workers;
    pool.emplace_back(run, begin, end);
  }
  for (auto& t : pool) t.join();
}

ObstacleSet transform_to_body(const ObstacleSet& points, const Pose2& pose) {
  ObstacleSet out;
  out.points.assign(points.capacity(), Point2{kPaddedCoordinate, kPaddedCoordinate});
  out.mask = points.mask;
  const double c = std::cos(pose.theta);
  const double s = std::sin(pose.theta);
  for (std::size_t i = 0; i < points.capacity(); ++i) {
    if (!points.mask[i]) continue;
    double dx = points.points[i].x - pose.x;
    double dy = points.points[i].y - pose.y;
    out.points[i] = {c * dx + s * dy, -s * dx + c * dy};
  }
  return out;
}

double min_signed_distance(const PreparedFootprint& footprint, const ObstacleSet& body_points,
                           double empty_value) {
  double best = empty_value;
  bool any = false;
  for (std::size_t i = 0; i < body_points.capacity(); ++i) {
    if (!body_points.mask[i]) continue;
    Point2 p = body_points.points[i];
    // Far points cannot beat the running minimum: d >= |p| - R.
    double thr = footprint.bounding_radius + (any ? best : empty_value);
    if (any && thr > 0.0 && p.x * p.x + p.y * p.y >= thr * thr) continue;
    double d = footprint.sd(p);
    if (!any || d < best) best = d;
    any = true;
  }
  return any ? best : empty_value;
}

double min_signed_distance(const FootprintSpec& footprint, const ObstacleSet& body_points,
                           double empty_value) {
  return min_signed_distance(prepare(footprint), body_points, empty_value);
}

double min_signed_distance_at(const PreparedFootprint& footprint, const Pose2& pose,
                              const ObstacleSet& world_points, double empty_value) {
  const double c = std::cos(pose.theta);
  const double s = std::sin(pose.theta);
  double best = empty_value;
  bool any = false;
  const std::size_t n = world_points.capacity();
  for (std::size_t i = 0; i < n; ++i) {
    if (!world_points.mask[i]) continue;
    double dx = world_points.points[i].x - pose.x;
    double dy = world_points.points[i].y - pose.y;
    double thr = footprint.bounding_radius + (any ? best : empty_value);
    if (any && thr > 0.0 && dx * dx + dy * dy >= thr * thr) continue;
    double d = footprint.sd({c * dx + s * dy, -s * dx + c * dy});
    if (!any || d < best) best = d;
    any = true;
  }
  return any ? best : empty_value;
}

double directional_width(const FootprintSpec& footprint, Point2 n) {
  if (std::abs(norm(n) - 1.0) > 1e-9)
    throw std::invalid_argument("directional_width requires a unit direction");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (Point2 v : footprint.all_vertices()) {
    double proj = dot(n, v);
    lo = std::min(lo, proj);
    hi = std::max(hi, proj);
  }
  return hi - lo;
}

std::vector<Point2> convex_hull(std::vector<Point2> points) {
  std::sort(points.begin(), points.end(), [](Point2 a, Point2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  points.erase(std::unique(points.begin(), points.end(),
                           [](Point2 a, Point2 b) { return a.x == b.x && a.y == b.y; }),
               points.end());
  const std::size_t n = points.size();
  if (n < 3) return points;
  std::vector<Point2> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {  // lower
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], points[i] - hull[k - 2]) <= 0.0) --k;
    hull[k++] = points[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {  // upper
    while (k >= t && cross(hull[k - 1] - hull[k - 2], points[i] - hull[k - 2]) <= 0.0) --k;
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  return hull;
}

FootprintSpec convex_hull_footprint(const FootprintSpec& footprint) {
  auto hull = convex_hull(footprint.all_vertices());
  FootprintSpec out;
  out.name = footprint.name + "-hull";
  out.shape = PolygonFootprint::make(std::move(hull));
  return out;
}

Point2 SdfGrid::cell_center(std::size_t ix, std::size_t iy) const {
  return {bounds.min.x + (static_cast<double>(ix) + 0.5) * resolution,
          bounds.min.y + (static_cast<double>(iy) + 0.5) * resolution};
}

SdfGrid sdf_grid(const FootprintSpec& footprint, const GridBounds& bounds, double resolution,
                 std::size_t cell_cap) {
  if (resolution <= 0.0) throw std::invalid_argument("resolution must be positive");
  if (bounds.max.x <= bounds.min.x || bounds.max.y <= bounds.min.y)
    throw std::invalid_argument("grid bounds are empty");
  SdfGrid grid;
  grid.bounds = bounds;
  grid.resolution = resolution;
  grid.nx = static_cast<std::size_t>(std::ceil((bounds.max.x - bounds.min.x) / resolution));
  grid.ny = static_cast<std::size_t>(std::ceil((bounds.max.y - bounds.min.y) / resolution));
  grid.nx = std::max<std::size_t>(grid.nx, 1);
  grid.ny = std::max<std::size_t>(grid.ny, 1);
  if (grid.nx * grid.ny > cell_cap) throw std::invalid_argument("grid exceeds cell cap");
  auto prepared = prepare(footprint);
  grid.values.resize(grid.nx * grid.ny);
  for (std::size_t iy = 0; iy < grid.ny; ++iy)
    for (std::size_t ix = 0; ix < grid.nx; ++ix)
      grid.values[iy * grid.nx + ix] = prepared.sd(grid.cell_center(ix, iy));
  return grid;
}

}  // namespace exactmppi

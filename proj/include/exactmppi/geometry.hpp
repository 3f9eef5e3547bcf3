#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace exactmppi {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // radians, stored unwrapped
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }

double norm(Point2 p);
double dot(Point2 a, Point2 b);
double cross(Point2 a, Point2 b);

/// Wrap an angle to (-pi, pi].
double wrap_angle(double a);

// Padded obstacle-set entries hold this coordinate and mask=false.
inline constexpr double kPaddedCoordinate = 1e9;
// Reductions over an all-invalid mask report this clearance.
inline constexpr double kEmptyMaskDistance = 1e6;
// Queries closer to the boundary than this report signed distance 0.
inline constexpr double kBoundaryEpsilon = 1e-12;

struct AxisRectangle {
  Point2 center;
  Point2 half_extent;  // both components > 0
};

/// Union of axis-aligned rectangles in the body frame.
struct RectangleCover {
  std::vector<AxisRectangle> rectangles;

  static RectangleCover make(std::vector<AxisRectangle> rects);  // validates
};

/// Simple polygon in the body frame, vertices counter-clockwise.
///
/// Construction rejects self-intersecting boundaries and zero-length edges;
/// clockwise input is reversed (with a warning on stderr).
class PolygonFootprint {
 public:
  static PolygonFootprint make(std::vector<Point2> vertices);

  const std::vector<Point2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }

 private:
  PolygonFootprint() = default;
  std::vector<Point2> vertices_;
};

/// Robot collision geometry: exactly one representation plus a name.
struct FootprintSpec {
  std::string name;
  std::variant<RectangleCover, PolygonFootprint> shape;

  bool is_polygon() const { return std::holds_alternative<PolygonFootprint>(shape); }
  const PolygonFootprint& polygon() const { return std::get<PolygonFootprint>(shape); }
  const RectangleCover& cover() const { return std::get<RectangleCover>(shape); }

  /// Polygon vertices, or all rectangle corners for a cover.
  std::vector<Point2> all_vertices() const;
  /// Max distance of any vertex from the body origin.
  double bounding_radius() const;
  /// Closed outlines for drawing and ground-truth tests (one per rectangle,
  /// or the polygon itself).
  std::vector<std::vector<Point2>> outlines() const;
};

/// Fixed-budget obstacle point array with validity mask.
struct ObstacleSet {
  std::vector<Point2> points;
  std::vector<std::uint8_t> mask;

  static ObstacleSet padded(std::span<const Point2> valid_points, std::size_t capacity);
  static ObstacleSet all_masked(std::size_t capacity);

  std::size_t capacity() const { return points.size(); }
  std::size_t valid_count() const;
};

// --- signed-distance primitives -------------------------------------------

/// Point-to-box signed distance; negative inside, exact Euclidean outside.
double sd_box(Point2 p, Point2 center, Point2 half_extent);

/// Min over the cover's rectangles. Exterior values are exact distances to
/// the union boundary; interior magnitudes may differ where rectangles
/// overlap, but the sign is always correct.
double sd_rect_cover(Point2 p, const RectangleCover& cover);

/// Distance from p to the closed segment [a, b].
double point_segment_distance(Point2 p, Point2 a, Point2 b);

/// Ray cast along +x with a half-open edge rule: an edge counts iff one
/// endpoint is strictly below p.y and the other is at or above it.
bool point_in_polygon(Point2 p, std::span<const Point2> vertices);
bool point_in_polygon(Point2 p, const PolygonFootprint& poly);

/// Exact signed distance to a simple polygon boundary (convex or concave).
/// Points within kBoundaryEpsilon of the boundary report exactly 0.
double sd_polygon(Point2 p, std::span<const Point2> vertices);
double sd_polygon(Point2 p, const PolygonFootprint& poly);

double signed_distance(Point2 p, const FootprintSpec& footprint);

// --- batched evaluation ----------------------------------------------------

/// Footprint baked into flat arrays for the batched kernels.
struct PreparedFootprint {
  enum class Kind { kRectCover, kPolygon } kind = Kind::kPolygon;
  // Polygon edges (vertex, direction, 1/|e|^2), contiguous.
  std::vector<double> vx, vy, ex, ey, inv_len2;
  // Rectangles.
  std::vector<double> cx, cy, hx, hy;
  double bounding_radius = 0.0;

  double sd(Point2 p) const;
};

PreparedFootprint prepare(const FootprintSpec& footprint);

/// Signed distance for every query point. Partitionable with no shared
/// mutable state; `threads` <= 1 runs serially.
void batch_signed_distance(std::span<const Point2> queries, const PreparedFootprint& footprint,
                           std::span<double> out, int threads = 1);

/// Rotate/translate valid points into the body frame at `pose`; padded
/// entries are re-set to the sentinel.
ObstacleSet transform_to_body(const ObstacleSet& points, const Pose2& pose);

/// Min signed distance over valid points; `empty_value` when the mask is
/// empty so masked-out cycles never read as collisions.
double min_signed_distance(const FootprintSpec& footprint, const ObstacleSet& body_points,
                           double empty_value = kEmptyMaskDistance);
double min_signed_distance(const PreparedFootprint& footprint, const ObstacleSet& body_points,
                           double empty_value = kEmptyMaskDistance);

/// Min signed distance evaluated at `pose` without materializing the
/// transformed set (the hot path of rollout scoring).
double min_signed_distance_at(const PreparedFootprint& footprint, const Pose2& pose,
                              const ObstacleSet& world_points,
                              double empty_value = kEmptyMaskDistance);

// --- footprint measures ----------------------------------------------------

/// Width of the footprint's projection onto unit vector n (exact; extrema of
/// a polygon projection lie at vertices). Rejects non-unit n.
double directional_width(const FootprintSpec& footprint, Point2 n);

/// Monotone-chain convex hull, counter-clockwise, collinear points dropped.
std::vector<Point2> convex_hull(std::vector<Point2> points);

/// Footprint replaced by the convex hull of its vertices.
FootprintSpec convex_hull_footprint(const FootprintSpec& footprint);

struct GridBounds {
  Point2 min;
  Point2 max;
};

struct SdfGrid {
  std::size_t nx = 0;
  std::size_t ny = 0;
  GridBounds bounds;
  double resolution = 0.0;
  std::vector<double> values;  // row-major: values[iy * nx + ix]

  Point2 cell_center(std::size_t ix, std::size_t iy) const;
};

/// Sample signed distance at cell centers. Rejects empty bounds and grids
/// above `cell_cap` cells.
SdfGrid sdf_grid(const FootprintSpec& footprint, const GridBounds& bounds, double resolution,
                 std::size_t cell_cap = 4'000'000);

// --- segment helpers shared with the simulator -----------------------------

/// True if closed segments [a,b] and [c,d] share any point.
bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d);

/// Twice the signed area of a closed polygon (positive when CCW).
double signed_area2(std::span<const Point2> vertices);

}  // namespace exactmppi

#include "exactmppi/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "exactmppi/rng.hpp"

namespace exactmppi {

namespace {

constexpr double kBoundarySpacing = 0.05;  // m, finer than the default d_safe
constexpr int kOcclusionBins = 720;

double trail_length(const TrailMotion& trail) {
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < trail.waypoints.size(); ++i)
    len += norm(trail.waypoints[i + 1] - trail.waypoints[i]);
  return len;
}

Point2 trail_point(const TrailMotion& trail, double arc) {
  double remaining = arc;
  for (std::size_t i = 0; i + 1 < trail.waypoints.size(); ++i) {
    double seg = norm(trail.waypoints[i + 1] - trail.waypoints[i]);
    if (remaining <= seg || i + 2 == trail.waypoints.size()) {
      double t = seg > 0.0 ? std::clamp(remaining / seg, 0.0, 1.0) : 0.0;
      return trail.waypoints[i] + t * (trail.waypoints[i + 1] - trail.waypoints[i]);
    }
    remaining -= seg;
  }
  return trail.waypoints.front();
}

std::vector<Point2> shape_boundary_samples(const Obstacle& obstacle, Point2 offset) {
  std::vector<Point2> samples;
  if (std::holds_alternative<PolygonFootprint>(obstacle.shape)) {
    const auto& verts = std::get<PolygonFootprint>(obstacle.shape).vertices();
    const std::size_t n = verts.size();
    for (std::size_t i = 0; i < n; ++i) {
      Point2 a = verts[i] + offset;
      Point2 b = verts[(i + 1) % n] + offset;
      double len = norm(b - a);
      int steps = std::max(1, static_cast<int>(std::ceil(len / kBoundarySpacing)));
      for (int k = 0; k < steps; ++k) {
        double t = static_cast<double>(k) / steps;
        samples.push_back(a + t * (b - a));
      }
    }
  } else {
    const auto& disc = std::get<Disc>(obstacle.shape);
    double circumference = 2.0 * std::numbers::pi * disc.radius;
    int steps = std::max(8, static_cast<int>(std::ceil(circumference / kBoundarySpacing)));
    for (int k = 0; k < steps; ++k) {
      double ang = 2.0 * std::numbers::pi * k / steps;
      samples.push_back({disc.center.x + offset.x + disc.radius * std::cos(ang),
                         disc.center.y + offset.y + disc.radius * std::sin(ang)});
    }
  }
  return samples;
}

std::vector<std::vector<Point2>> obstacle_outline(const Obstacle& obstacle, Point2 offset,
                                                  int disc_segments = 64) {
  std::vector<std::vector<Point2>> out;
  if (std::holds_alternative<PolygonFootprint>(obstacle.shape)) {
    auto verts = std::get<PolygonFootprint>(obstacle.shape).vertices();
    for (auto& v : verts) v = v + offset;
    out.push_back(std::move(verts));
  } else {
    const auto& disc = std::get<Disc>(obstacle.shape);
    std::vector<Point2> ring;
    ring.reserve(static_cast<std::size_t>(disc_segments));
    for (int k = 0; k < disc_segments; ++k) {
      double ang = 2.0 * std::numbers::pi * k / disc_segments;
      ring.push_back({disc.center.x + offset.x + disc.radius * std::cos(ang),
                      disc.center.y + offset.y + disc.radius * std::sin(ang)});
    }
    out.push_back(std::move(ring));
  }
  return out;
}

std::vector<Point2> posed_outline(std::span<const Point2> body, const Pose2& pose) {
  std::vector<Point2> out;
  out.reserve(body.size());
  double c = std::cos(pose.theta);
  double s = std::sin(pose.theta);
  for (Point2 v : body)
    out.push_back({pose.x + c * v.x - s * v.y, pose.y + s * v.x + c * v.y});
  return out;
}

bool polygons_collide(std::span<const Point2> a, std::span<const Point2> b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (segments_intersect(a[i], a[(i + 1) % a.size()], b[j], b[(j + 1) % b.size()]))
        return true;
  if (point_in_polygon(a[0], b)) return true;
  if (point_in_polygon(b[0], a)) return true;
  return false;
}

double polygon_boundary_distance(std::span<const Point2> a, std::span<const Point2> b) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      d = std::min(d, point_segment_distance(a[i], b[j], b[(j + 1) % b.size()]));
  for (std::size_t j = 0; j < b.size(); ++j)
    for (std::size_t i = 0; i < a.size(); ++i)
      d = std::min(d, point_segment_distance(b[j], a[i], a[(i + 1) % a.size()]));
  return d;
}

}  // namespace

WorldState WorldState::initial(const Scenario& scenario) {
  WorldState state;
  state.arc.assign(scenario.obstacles.size(), 0.0);
  state.direction.assign(scenario.obstacles.size(), 1);
  return state;
}

WorldState step_world(const Scenario& scenario, const WorldState& state, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("step_world requires dt > 0");
  WorldState next = state;
  for (std::size_t i = 0; i < scenario.obstacles.size(); ++i) {
    const auto& motion = scenario.obstacles[i].motion;
    if (!motion || motion->speed <= 0.0 || motion->waypoints.size() < 2) continue;
    double len = trail_length(*motion);
    if (len <= 0.0) continue;
    double travel = motion->speed * dt;
    double arc = state.arc[i];
    int dir = state.direction[i];
    if (motion->ping_pong) {
      arc += dir * travel;
      // Reflect until the arc lands inside [0, len].
      while (arc < 0.0 || arc > len) {
        if (arc > len) {
          arc = 2.0 * len - arc;
          dir = -dir;
        } else {
          arc = -arc;
          dir = -dir;
        }
      }
    } else {
      arc = std::clamp(arc + dir * travel, 0.0, len);
    }
    next.arc[i] = arc;
    next.direction[i] = dir;
  }
  return next;
}

Point2 obstacle_offset(const Scenario& scenario, const WorldState& state, std::size_t i) {
  const auto& motion = scenario.obstacles[i].motion;
  if (!motion || motion->waypoints.size() < 2) return {0.0, 0.0};
  Point2 at = trail_point(*motion, state.arc[i]);
  return at - motion->waypoints.front();
}

namespace {

bool segment_hits_obstacle(Point2 a, Point2 b, const Obstacle& obstacle, Point2 offset) {
  if (std::holds_alternative<Disc>(obstacle.shape)) {
    const auto& disc = std::get<Disc>(obstacle.shape);
    return point_segment_distance(disc.center + offset, a, b) < disc.radius - 1e-9;
  }
  const auto& verts = std::get<PolygonFootprint>(obstacle.shape).vertices();
  const std::size_t n = verts.size();
  for (std::size_t i = 0; i < n; ++i)
    if (segments_intersect(a, b, verts[i] + offset, verts[(i + 1) % n] + offset)) return true;
  return false;
}

}  // namespace

ObstacleSet sense(const Scenario& scenario, const WorldState& state, const Pose2& robot,
                  std::uint64_t sample_key) {
  const auto& sensor = scenario.sensor;
  if (sensor.budget < 1) throw std::invalid_argument("sensor budget must be >= 1");

  // Nearest boundary sample per angular bin, LiDAR-like.
  std::vector<Point2> nearest(kOcclusionBins);
  std::vector<double> nearest_d(kOcclusionBins, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < scenario.obstacles.size(); ++i) {
    Point2 offset = obstacle_offset(scenario, state, i);
    for (Point2 p : shape_boundary_samples(scenario.obstacles[i], offset)) {
      double dx = p.x - robot.x;
      double dy = p.y - robot.y;
      double d = std::sqrt(dx * dx + dy * dy);
      if (d > sensor.range) continue;
      double ang = std::atan2(dy, dx);
      int bin = static_cast<int>((ang + std::numbers::pi) / (2.0 * std::numbers::pi) *
                                 kOcclusionBins);
      bin = std::clamp(bin, 0, kOcclusionBins - 1);
      if (d < nearest_d[static_cast<std::size_t>(bin)]) {
        nearest_d[static_cast<std::size_t>(bin)] = d;
        nearest[static_cast<std::size_t>(bin)] = p;
      }
    }
  }

  // Exact line-of-sight pass: a sample survives only if the ray from the
  // robot reaches it without passing through any shape (the ray is shortened
  // a hair so the sample's own surface does not hit).
  std::vector<Point2> visible;
  Point2 eye{robot.x, robot.y};
  for (int b = 0; b < kOcclusionBins; ++b) {
    if (!std::isfinite(nearest_d[static_cast<std::size_t>(b)])) continue;
    Point2 p = nearest[static_cast<std::size_t>(b)];
    double d = nearest_d[static_cast<std::size_t>(b)];
    double shrink = d > 1e-6 ? (d - 1e-6) / d : 0.0;
    Point2 target = eye + shrink * (p - eye);
    bool blocked = false;
    for (std::size_t i = 0; i < scenario.obstacles.size() && !blocked; ++i)
      blocked = segment_hits_obstacle(eye, target, scenario.obstacles[i],
                                      obstacle_offset(scenario, state, i));
    if (!blocked) visible.push_back(p);
  }

  const std::size_t budget = static_cast<std::size_t>(sensor.budget);
  if (visible.size() > budget) {
    // Seeded partial Fisher-Yates, then restore scan order.
    std::vector<std::size_t> idx(visible.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = 0; i < budget; ++i) {
      std::size_t j = i + uniform_index(scenario.seed, sample_key, i, idx.size() - i);
      std::swap(idx[i], idx[j]);
    }
    idx.resize(budget);
    std::sort(idx.begin(), idx.end());
    std::vector<Point2> kept;
    kept.reserve(budget);
    for (std::size_t i : idx) kept.push_back(visible[i]);
    visible = std::move(kept);
  }
  return ObstacleSet::padded(visible, budget);
}

bool footprint_intersects_ring(const FootprintSpec& footprint, const Pose2& pose,
                               std::span<const Point2> ring) {
  for (const auto& outline : footprint.outlines())
    if (polygons_collide(posed_outline(outline, pose), ring)) return true;
  return false;
}

bool ground_truth_collision(const FootprintSpec& footprint, const Pose2& pose,
                            const Scenario& scenario, const WorldState& state) {
  auto body_outlines = footprint.outlines();
  std::vector<std::vector<Point2>> posed;
  posed.reserve(body_outlines.size());
  for (const auto& o : body_outlines) posed.push_back(posed_outline(o, pose));

  for (std::size_t i = 0; i < scenario.obstacles.size(); ++i) {
    Point2 offset = obstacle_offset(scenario, state, i);
    const auto& obstacle = scenario.obstacles[i];
    if (std::holds_alternative<Disc>(obstacle.shape)) {
      const auto& disc = std::get<Disc>(obstacle.shape);
      Point2 center = disc.center + offset;
      for (const auto& poly : posed)
        if (sd_polygon(center, poly) < disc.radius) return true;
    } else {
      auto rings = obstacle_outline(obstacle, offset);
      for (const auto& ring : rings)
        for (const auto& poly : posed)
          if (polygons_collide(poly, ring)) return true;
    }
  }
  return false;
}

double ground_truth_clearance(const FootprintSpec& footprint, const Pose2& pose,
                              const Scenario& scenario, const WorldState& state) {
  auto body_outlines = footprint.outlines();
  std::vector<std::vector<Point2>> posed;
  posed.reserve(body_outlines.size());
  for (const auto& o : body_outlines) posed.push_back(posed_outline(o, pose));

  double clearance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scenario.obstacles.size(); ++i) {
    Point2 offset = obstacle_offset(scenario, state, i);
    const auto& obstacle = scenario.obstacles[i];
    if (std::holds_alternative<Disc>(obstacle.shape)) {
      const auto& disc = std::get<Disc>(obstacle.shape);
      Point2 center = disc.center + offset;
      for (const auto& poly : posed)
        clearance = std::min(clearance, std::abs(sd_polygon(center, poly)) - disc.radius);
    } else {
      auto rings = obstacle_outline(obstacle, offset);
      for (const auto& ring : rings) {
        for (const auto& poly : posed) {
          if (polygons_collide(poly, ring)) return 0.0;
          clearance = std::min(clearance, polygon_boundary_distance(poly, ring));
        }
      }
    }
  }
  return std::max(clearance, 0.0);
}

std::string failure_kind_name(FailureKind kind) {
  switch (kind) {
    case FailureKind::kNone:
      return "none";
    case FailureKind::kCollision:
      return "collision";
    case FailureKind::kTimeout:
      return "timeout";
    case FailureKind::kStall:
      return "stall";
  }
  return "?";
}

double effective_width(const FootprintSpec& footprint, const MotionModel& model) {
  const Point2 lateral{0.0, 1.0};       // normal to body +x travel
  const Point2 longitudinal{1.0, 0.0};  // normal to body +y travel
  switch (model.tag) {
    case ModelTag::kDiff:
    case ModelTag::kAckermann:
      return directional_width(footprint, lateral);
    case ModelTag::kParallel:
      return directional_width(footprint, longitudinal);
    case ModelTag::kOmni:
    case ModelTag::kSpin:
      return std::min(directional_width(footprint, lateral),
                      directional_width(footprint, longitudinal));
  }
  return directional_width(footprint, lateral);
}

double compute_don(const Scenario& scenario, const FootprintSpec& footprint,
                   std::optional<Point2> translation_direction) {
  if (!scenario.gap) throw std::invalid_argument("scenario declares no gap for DoN");
  double gap_width = norm(scenario.gap->b - scenario.gap->a);
  if (gap_width <= 0.0) throw std::invalid_argument("declared gap is degenerate");
  double width;
  if (translation_direction) {
    Point2 d = *translation_direction;
    double n = norm(d);
    if (n <= 0.0) throw std::invalid_argument("translation direction is degenerate");
    width = directional_width(footprint, {-d.y / n, d.x / n});
  } else {
    width = effective_width(footprint, scenario.model);
  }
  return width / gap_width;
}

EpisodeResult run_episode(const Scenario& scenario, const EpisodeOptions& options) {
  scenario.mppi.validate();
  if (scenario.guidance.empty()) throw std::invalid_argument("scenario guidance is empty");
  if (scenario.goal_tolerance.position <= 0.0 || scenario.goal_tolerance.heading <= 0.0)
    throw std::invalid_argument("goal tolerances must be positive");

  FootprintSpec footprint =
      options.convex_hull_wrap ? convex_hull_footprint(scenario.footprint) : scenario.footprint;

  WorldState world = WorldState::initial(scenario);
  if (ground_truth_collision(footprint, scenario.start, scenario, world))
    throw std::invalid_argument("scenario start pose is not collision-free");

  MppiParams params = scenario.mppi;
  params.seed = scenario.seed;

  std::optional<MppiController> single;
  std::optional<HybridController> hybrid;
  MotionModel active_model = scenario.model;
  if (scenario.hybrid) {
    hybrid.emplace(scenario.hybrid->modes, footprint, params, scenario.hybrid->params,
                   options.threads);
  } else {
    single.emplace(scenario.model, scenario.limits, footprint, params, options.threads);
  }

  Guidance guidance;
  guidance.path = scenario.guidance;
  guidance.goal = scenario.goal;

  PreparedFootprint prepared = prepare(footprint);

  EpisodeResult result;
  Pose2 pose = scenario.start;
  double t = 0.0;
  const double dt = params.dt;
  double path_length = 0.0;
  double min_clearance = std::numeric_limits<double>::infinity();
  std::vector<Pose2> recent;  // stall window ring, indexed by cycle

  auto at_goal = [&](const Pose2& q) {
    double dx = q.x - scenario.goal.x;
    double dy = q.y - scenario.goal.y;
    if (std::sqrt(dx * dx + dy * dy) > scenario.goal_tolerance.position) return false;
    return std::abs(wrap_angle(q.theta - scenario.goal.theta)) <= scenario.goal_tolerance.heading;
  };

  const std::size_t stall_cycles =
      static_cast<std::size_t>(std::llround(options.stall_window / dt));
  std::uint64_t cycle = 0;

  while (true) {
    min_clearance = std::min(min_clearance,
                             ground_truth_clearance(footprint, pose, scenario, world));

    if (at_goal(pose)) {
      result.success = true;
      result.failure_kind = FailureKind::kNone;
      break;
    }
    if (t >= scenario.time_limit) {
      result.failure_kind = FailureKind::kTimeout;
      break;
    }
    recent.push_back(pose);
    if (stall_cycles > 0 && recent.size() > stall_cycles) {
      const Pose2& old = recent[recent.size() - 1 - stall_cycles];
      double moved = std::sqrt((pose.x - old.x) * (pose.x - old.x) +
                               (pose.y - old.y) * (pose.y - old.y));
      if (moved < options.stall_displacement) {
        result.failure_kind = FailureKind::kStall;
        break;
      }
    }

    ObstacleSet observed = sense(scenario, world, pose, cycle);
    double d_here = min_signed_distance_at(prepared, pose, observed);

    ControlInput command;
    std::string mode_name = "-";
    CycleTrace trace;
    trace.cycle = cycle;
    if (hybrid) {
      auto decision = hybrid->hybrid_cycle(pose, observed, guidance);
      command = decision.command;
      mode_name = decision.mode_name;
      active_model = hybrid->modes()[static_cast<std::size_t>(decision.mode_index)].model;
      trace.best_cost = decision.diagnostics.best_cost;
      trace.validated = decision.validated;
      trace.mode = decision.mode_name;
      trace.mode_costs = decision.mode_costs;
      for (const double d : decision.diagnostics.nominal_d_min)
        trace.min_horizon_distance = std::min(trace.min_horizon_distance, d);
    } else {
      auto decision = single->control_cycle(pose, observed, guidance);
      command = decision.command;
      active_model = scenario.model;
      trace.best_cost = decision.diagnostics.best_cost;
      trace.validated = decision.validated;
      for (const double d : decision.diagnostics.nominal_d_min)
        trace.min_horizon_distance = std::min(trace.min_horizon_distance, d);
    }
    if (options.diagnostics_sink) {
      for (int i = 0; i < command.dim && i < 3; ++i)
        trace.command[static_cast<std::size_t>(i)] = command[i];
      options.diagnostics_sink(trace);
    }

    TrajectoryRow row;
    row.t = t;
    row.pose = pose;
    for (int i = 0; i < command.dim && i < 3; ++i)
      row.command[static_cast<std::size_t>(i)] = command[i];
    row.d_min_planner = d_here;
    row.mode = scenario.hybrid ? mode_name : std::string("-");
    result.trajectory.push_back(std::move(row));

    Pose2 next = step(active_model, pose, command, dt);
    path_length += std::sqrt((next.x - pose.x) * (next.x - pose.x) +
                             (next.y - pose.y) * (next.y - pose.y));
    pose = next;
    t += dt;
    world = step_world(scenario, world, dt);
    ++cycle;

    if (ground_truth_collision(footprint, pose, scenario, world)) {
      min_clearance = 0.0;
      result.failure_kind = FailureKind::kCollision;
      break;
    }
  }

  // Final row records the terminal pose.
  TrajectoryRow last;
  last.t = t;
  last.pose = pose;
  last.d_min_planner = min_signed_distance_at(prepared, pose,
                                              sense(scenario, world, pose, cycle));
  result.trajectory.push_back(std::move(last));

  result.nav_time = t;
  result.path_length = path_length;
  result.mean_speed = (result.success && t > 0.0) ? path_length / t : 0.0;
  result.min_clearance = std::isfinite(min_clearance) ? min_clearance : kEmptyMaskDistance;
  return result;
}

}  // namespace exactmppi

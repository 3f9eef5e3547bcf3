#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "exactmppi/hybrid.hpp"

namespace exactmppi {

struct Disc {
  Point2 center;
  double radius = 0.0;
};

struct TrailMotion {
  std::vector<Point2> waypoints;  // >= 2; shape coordinates are at waypoints[0]
  double speed = 0.0;             // m/s, >= 0
  bool ping_pong = true;          // false clamps at the far end
};

struct Obstacle {
  std::variant<Disc, PolygonFootprint> shape;
  std::optional<TrailMotion> motion;
};

struct SensorConfig {
  double range = 10.0;
  int budget = 100;
};

struct GoalTolerance {
  double position = 0.3;  // m
  double heading = 0.6;   // rad
};

struct GapSpec {
  Point2 a;
  Point2 b;
};

struct HybridSetup {
  std::vector<HybridMode> modes;
  HybridParams params;
};

struct Scenario {
  FootprintSpec footprint;
  MotionModel model;
  KinematicLimits limits;
  MppiParams mppi;
  std::optional<HybridSetup> hybrid;
  std::vector<Obstacle> obstacles;
  Pose2 start;
  Pose2 goal;
  GoalTolerance goal_tolerance;
  std::vector<Point2> guidance;
  SensorConfig sensor;
  double time_limit = 60.0;
  std::uint64_t seed = 0;
  std::optional<GapSpec> gap;
  std::string name = "scenario";
};

/// Mutable world state: per-obstacle arc position along its trail.
struct WorldState {
  std::vector<double> arc;
  std::vector<int> direction;  // +1 forward, -1 backward along the trail

  static WorldState initial(const Scenario& scenario);
};

/// Quasi-static obstacle update: each trail advances speed*dt, ping-ponging
/// at the endpoints. Obstacles never move within a rollout horizon.
WorldState step_world(const Scenario& scenario, const WorldState& state, double dt);

/// World-frame displacement of obstacle i at the given state.
Point2 obstacle_offset(const Scenario& scenario, const WorldState& state, std::size_t i);

/// Point-based sensor: fixed-arc-length boundary samples, range cut,
/// angular-bin occlusion, seeded downsampling to the budget.
ObstacleSet sense(const Scenario& scenario, const WorldState& state, const Pose2& robot,
                  std::uint64_t sample_key);

/// Shape-vs-shape truth, independent of the planner's point checks.
bool ground_truth_collision(const FootprintSpec& footprint, const Pose2& pose,
                            const Scenario& scenario, const WorldState& state);

/// True if the posed footprint touches the closed polygon ring.
bool footprint_intersects_ring(const FootprintSpec& footprint, const Pose2& pose,
                               std::span<const Point2> ring);

/// Exact clearance between the posed footprint and all obstacles
/// (0 when touching or overlapping).
double ground_truth_clearance(const FootprintSpec& footprint, const Pose2& pose,
                              const Scenario& scenario, const WorldState& state);

enum class FailureKind { kNone, kCollision, kTimeout, kStall };

std::string failure_kind_name(FailureKind kind);

struct TrajectoryRow {
  double t = 0.0;
  Pose2 pose;
  std::array<double, 3> command{0.0, 0.0, 0.0};  // model-shaped, zero padded
  double d_min_planner = kEmptyMaskDistance;
  std::string mode = "-";
};

struct EpisodeResult {
  bool success = false;
  FailureKind failure_kind = FailureKind::kNone;
  double nav_time = 0.0;
  double path_length = 0.0;
  double mean_speed = 0.0;
  double min_clearance = 0.0;
  std::vector<TrajectoryRow> trajectory;
};

/// One line per control cycle for diagnostics streaming.
struct CycleTrace {
  std::uint64_t cycle = 0;
  double best_cost = 0.0;
  bool validated = false;
  std::array<double, 3> command{0.0, 0.0, 0.0};
  double min_horizon_distance = kEmptyMaskDistance;
  std::string mode;                // hybrid runs only
  std::vector<double> mode_costs;  // hybrid runs only, switch-penalized
};

struct EpisodeOptions {
  int threads = 1;
  bool convex_hull_wrap = false;  // Convex-MPPI baseline: same planner, hull footprint
  double stall_window = 15.0;     // seconds
  double stall_displacement = 0.05;
  std::function<void(const CycleTrace&)> diagnostics_sink;
};

/// sense -> control cycle -> execute -> advance world, until the goal
/// tolerance is met, ground truth reports a collision, the time limit
/// expires, or progress stalls.
EpisodeResult run_episode(const Scenario& scenario, const EpisodeOptions& options = {});

/// DoN = W_r / W_p against the scenario's declared gap. The translation
/// direction defaults to the model rule: body +x for diff/ackermann, body +y
/// for parallel, best cardinal axis for omni.
double compute_don(const Scenario& scenario, const FootprintSpec& footprint,
                   std::optional<Point2> translation_direction = std::nullopt);

/// Footprint width relevant to the model's translation rule (see compute_don).
double effective_width(const FootprintSpec& footprint, const MotionModel& model);

}  // namespace exactmppi

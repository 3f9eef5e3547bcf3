#include "exactmppi/scenario_gen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>

namespace exactmppi {

namespace {

struct Box {
  double x0, y0, x1, y1;
};

std::vector<Point2> box_ring(const Box& b, double inflate = 0.0) {
  return {{b.x0 - inflate, b.y0 - inflate},
          {b.x1 + inflate, b.y0 - inflate},
          {b.x1 + inflate, b.y1 + inflate},
          {b.x0 - inflate, b.y1 + inflate}};
}

Obstacle box_obstacle(const Box& b) {
  Obstacle obs;
  obs.shape = PolygonFootprint::make(box_ring(b));
  return obs;
}

KinematicLimits symmetric_limits(int dim, double vel, double acc) {
  KinematicLimits lims = KinematicLimits::unbounded();
  for (int i = 0; i < dim; ++i)
    lims.component[static_cast<std::size_t>(i)] = {-vel, vel, -acc, acc};
  return lims;
}

// Footprint-aware (x, y, theta) lattice search used to derive weak guidance
// for the tight settings, standing in for an upstream global planner. The
// exact footprint is checked against inflated obstacles, so the returned
// polyline encodes any tilting the passage requires.
std::optional<std::vector<Point2>> lattice_guidance(const FootprintSpec& footprint,
                                                    const std::vector<Box>& boxes, double inflate,
                                                    Point2 lo, Point2 hi, Pose2 start,
                                                    double goal_x, double res = 0.1, int nth = 24,
                                                    bool holonomic = true) {
  const int nx = static_cast<int>(std::floor((hi.x - lo.x) / res)) + 1;
  const int ny = static_cast<int>(std::floor((hi.y - lo.y) / res)) + 1;
  const double dth = 2.0 * std::numbers::pi / nth;

  std::vector<std::vector<Point2>> rings;
  rings.reserve(boxes.size());
  for (const auto& b : boxes) rings.push_back(box_ring(b, inflate));

  auto pose_at = [&](int ix, int iy, int ith) {
    return Pose2{lo.x + ix * res, lo.y + iy * res, ith * dth};
  };
  const std::size_t total = static_cast<std::size_t>(nx) * ny * nth;
  std::vector<signed char> free_cache(total, -1);
  auto node_id = [&](int ix, int iy, int ith) {
    return (static_cast<std::size_t>(ix) * ny + iy) * nth + ith;
  };
  auto is_free = [&](int ix, int iy, int ith) {
    std::size_t id = node_id(ix, iy, ith);
    if (free_cache[id] < 0) {
      Pose2 q = pose_at(ix, iy, ith);
      bool hit = false;
      for (const auto& ring : rings)
        if (footprint_intersects_ring(footprint, q, ring)) {
          hit = true;
          break;
        }
      free_cache[id] = hit ? 0 : 1;
    }
    return free_cache[id] == 1;
  };

  int six = static_cast<int>(std::lround((start.x - lo.x) / res));
  int siy = static_cast<int>(std::lround((start.y - lo.y) / res));
  int sith = static_cast<int>(std::lround(start.theta / dth)) % nth;
  if (sith < 0) sith += nth;
  if (six < 0 || six >= nx || siy < 0 || siy >= ny || !is_free(six, siy, sith))
    return std::nullopt;

  const double turn_cost = 0.18;
  std::vector<double> dist(total, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> parent(total, total);
  using QEntry = std::pair<double, std::size_t>;
  std::priority_queue<QEntry, std::vector<QEntry>, std::greater<>> queue;
  std::size_t start_id = node_id(six, siy, sith);
  dist[start_id] = 0.0;
  auto heuristic = [&](int ix) {
    double x = lo.x + ix * res;
    return x < goal_x ? goal_x - x : 0.0;
  };
  queue.push({heuristic(six), start_id});

  std::size_t goal_id = total;
  while (!queue.empty()) {
    auto [f, id] = queue.top();
    queue.pop();
    int ith = static_cast<int>(id % nth);
    int iy = static_cast<int>((id / nth) % ny);
    int ix = static_cast<int>(id / (static_cast<std::size_t>(ny) * nth));
    if (f > dist[id] + heuristic(ix) + 1e-12) continue;
    if (lo.x + ix * res >= goal_x) {
      goal_id = id;
      break;
    }
    auto relax = [&](int jx, int jy, int jth, double cost) {
      if (jx < 0 || jx >= nx || jy < 0 || jy >= ny) return;
      jth = (jth + nth) % nth;
      if (!is_free(jx, jy, jth)) return;
      std::size_t jid = node_id(jx, jy, jth);
      double nd = dist[id] + cost;
      if (nd < dist[jid] - 1e-12) {
        dist[jid] = nd;
        parent[jid] = id;
        queue.push({nd + heuristic(jx), jid});
      }
    };
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy) {
        if (dx == 0 && dy == 0) continue;
        double step_cost = res * std::sqrt(double(dx * dx + dy * dy));
        if (!holonomic) {
          // Differential drive: translate only (roughly) along the heading,
          // forward or reverse; reverse costs extra.
          double move_ang = std::atan2(double(dy), double(dx));
          double heading = ith * dth;
          double fwd = std::abs(wrap_angle(move_ang - heading));
          double rev = std::abs(wrap_angle(move_ang - heading - std::numbers::pi));
          if (fwd > 0.45 && rev > 0.45) continue;
          if (rev <= 0.45) step_cost *= 1.4;
        }
        relax(ix + dx, iy + dy, ith, step_cost);
      }
    relax(ix, iy, ith + 1, turn_cost);
    relax(ix, iy, ith - 1, turn_cost);
  }
  if (goal_id == total) return std::nullopt;

  std::vector<Point2> raw;
  for (std::size_t id = goal_id; id != total; id = parent[id]) {
    int iy = static_cast<int>((id / nth) % ny);
    int ix = static_cast<int>(id / (static_cast<std::size_t>(ny) * nth));
    Point2 p{lo.x + ix * res, lo.y + iy * res};
    if (raw.empty() || norm(p - raw.back()) > 1e-9) raw.push_back(p);
    if (id == parent[id]) break;
  }
  std::reverse(raw.begin(), raw.end());

  // Smooth out lattice shuffle (multi-point-turn jitter), then decimate to
  // sparse waypoints; weak guidance only needs the gross route.
  std::vector<Point2> smooth(raw.size());
  const int w = 4;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    Point2 acc{0, 0};
    int count = 0;
    for (int k = -w; k <= w; ++k) {
      std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) + k;
      if (j < 0 || j >= static_cast<std::ptrdiff_t>(raw.size())) continue;
      acc = acc + raw[static_cast<std::size_t>(j)];
      ++count;
    }
    smooth[i] = (1.0 / count) * acc;
  }
  std::vector<Point2> thin;
  thin.push_back(smooth.front());
  for (std::size_t i = 1; i + 1 < smooth.size(); ++i)
    if (norm(smooth[i] - thin.back()) > 0.45) thin.push_back(smooth[i]);
  thin.push_back(smooth.back());
  return thin;
}

}  // namespace

Scenario make_corridor_scenario(const FootprintSpec& footprint, double don, std::uint64_t seed) {
  if (don <= 0.0 || don > 1.2) throw std::invalid_argument("corridor don must lie in (0, 1.2]");

  Scenario s;
  s.footprint = footprint;
  s.model = MotionModel::diff();
  s.limits = symmetric_limits(2, 2.0, 2.5);
  s.limits.component[1] = {-0.9, 0.9, -6.0, 6.0};

  const double width = effective_width(footprint, s.model);
  const double gap = width / don;

  const double half_corridor = 3.0;
  const double wall_t = 0.3;
  const double x_min = -7.5, x_max = 7.5;
  const double block_w = 0.8;

  const Box top_wall{x_min, half_corridor, x_max, half_corridor + wall_t};
  const Box bottom_wall{x_min, -half_corridor - wall_t, x_max, -half_corridor};
  std::vector<Box> boxes{top_wall, bottom_wall};

  const bool staggered = don > 0.9;
  s.mppi.rollouts = staggered ? 1280 : 512;
  s.mppi.horizon = staggered ? 40 : 30;
  s.mppi.dt = 0.1;
  s.mppi.lambda = staggered ? 0.35 : 0.8;
  s.mppi.sigma = staggered ? std::array<double, 3>{0.5, 0.8, 0.3}
                           : std::array<double, 3>{0.45, 0.6, 0.3};
  s.mppi.d_safe = staggered ? 0.10 : 0.09;
  s.mppi.w_rep = 60.0;
  s.mppi.task = staggered ? TaskWeights{0.25, 0.3, 2.2, 4.0} : TaskWeights{0.25, 0.3, 1.6, 3.0};
  s.mppi.w_ctrl = 0.02;
  if (!staggered) {
    // Straight pinch centered at x = 0.
    boxes.push_back({-block_w / 2, gap / 2, block_w / 2, half_corridor});
    boxes.push_back({-block_w / 2, -half_corridor, block_w / 2, -gap / 2});
    s.gap = GapSpec{{0.0, -gap / 2}, {0.0, gap / 2}};
    s.guidance = {{-6.5, 0.0}, {6.5, 0.0}};
  } else {
    // Staggered pinch: the blocks interlock deeply, leaving a vertical lane
    // between their faces; the only way through is a tilted S-climb with the
    // block corners riding the footprint's concavities. The declared gap is
    // the inner-corner pair, exactly `gap` apart. The overlap is searched
    // until the footprint-aware lattice finds a traversable channel, which
    // also yields the weak-guidance waypoints (an upstream-planner stand-in).
    bool found = false;
    for (double v_overlap : {-1.1, -1.0, -1.2, -0.9, -0.8}) {
      if (std::abs(v_overlap) >= gap) continue;
      const double s_x = std::sqrt(gap * gap - v_overlap * v_overlap);
      const double ya = -v_overlap / 2;  // top block lower edge
      const double yb = v_overlap / 2;   // bottom block upper edge
      const Box top_block{-s_x / 2 - block_w, ya, -s_x / 2, half_corridor};
      const Box bottom_block{s_x / 2, -half_corridor, s_x / 2 + block_w, yb};
      std::vector<Box> candidate = boxes;
      candidate.push_back(top_block);
      candidate.push_back(bottom_block);
      for (double margin : {s.mppi.d_safe + 0.07, s.mppi.d_safe + 0.05}) {
        auto path = lattice_guidance(footprint, candidate, margin,
                                     {-4.6, -half_corridor + 0.3}, {4.6, half_corridor - 0.3},
                                     {-4.5, 0.0, 0.0}, 4.4, 0.05, 36, false);
        if (!path) continue;
        boxes = candidate;
        s.gap = GapSpec{{-s_x / 2, ya}, {s_x / 2, yb}};
        s.guidance.clear();
        s.guidance.push_back({-6.5, 0.0});
        for (Point2 p : *path) s.guidance.push_back(p);
        s.guidance.push_back({6.5, 0.0});
        found = true;
        break;
      }
      if (found) break;
    }
    if (!found)
      throw std::runtime_error("corridor generator: no traversable channel at this DoN");
  }

  for (std::size_t i = 2; i < boxes.size(); ++i) s.obstacles.push_back(box_obstacle(boxes[i]));
  s.obstacles.insert(s.obstacles.begin(), box_obstacle(bottom_wall));
  s.obstacles.insert(s.obstacles.begin(), box_obstacle(top_wall));

  s.start = {-6.0, 0.0, 0.0};
  s.goal = {6.0, 0.0, 0.0};
  s.goal_tolerance = {0.4, 3.2};

  s.sensor = {4.5, 144};
  s.time_limit = staggered ? 140.0 : 60.0;
  s.seed = seed;
  s.name = "corridor_don";
  return s;
}

Scenario make_gap_scenario(const FootprintSpec& footprint, double don, std::uint64_t seed) {
  if (don <= 0.0 || don > 1.2) throw std::invalid_argument("gap don must lie in (0, 1.2]");

  Scenario s;
  s.footprint = footprint;
  s.model = MotionModel::omni();
  s.limits = symmetric_limits(3, 1.0, 2.0);

  const double width = effective_width(footprint, s.model);
  const double gap = width / don;

  const double wall_t = 0.2;
  const double wall_reach = 10.0;
  const double s_x = 1.2;  // horizontal clearance between wall faces
  if (gap <= s_x) throw std::invalid_argument("gap too small for the wall stagger");
  const double cy = std::sqrt(gap * gap - s_x * s_x);

  // Wall A rises from below, ending at (wt, -cy/2); wall B hangs from above
  // starting at (wt + s_x, +cy/2). The declared gap joins the two corners.
  const double ax = wall_t;  // inner corner of wall A (right face)
  const double bx = wall_t + s_x;
  const double ya = -cy / 2;
  const double yb = cy / 2;
  s.obstacles.push_back(box_obstacle({0.0, -wall_reach, ax, ya}));
  s.obstacles.push_back(box_obstacle({bx, yb, bx + wall_t, wall_reach}));
  s.gap = GapSpec{{ax, ya}, {bx, yb}};

  // The concave footprint's feasible tube enters high (its low half passes
  // over wall A), then dives so its tall half ducks under wall B while B's
  // corner rides through the concavity. The guidance traces that dogleg;
  // levels scale with the footprint's reach below/above the body origin.
  const double mx = (ax + bx) / 2;
  const double clearance = 0.24;
  double reach_low = 0.0, reach_high = 0.0;
  for (Point2 v : footprint.all_vertices()) {
    reach_low = std::min(reach_low, v.y);
    reach_high = std::max(reach_high, v.y);
  }
  const double y_in = ya - reach_low + clearance;
  const double y_out = yb - reach_high - clearance;
  s.guidance = {{-4.5, 0.0},
                {-1.8, y_in},
                {ax + 1.0, y_in},
                {bx + 0.6, y_out},
                {bx + 1.8, y_out},
                {mx + 4.5, 0.0}};

  s.start = {-4.0, 0.0, 0.0};
  s.goal = {mx + 4.0, 0.0, 0.0};
  s.goal_tolerance = {0.5, 6.3};

  s.mppi.rollouts = 512;
  s.mppi.horizon = 30;
  s.mppi.dt = 0.1;
  s.mppi.lambda = 0.8;
  s.mppi.sigma = {0.4, 0.4, 0.5};
  s.mppi.d_safe = 0.12;
  s.mppi.w_rep = 60.0;
  s.mppi.task = {0.25, 0.2, 1.6, 3.0};
  s.mppi.w_ctrl = 0.02;

  s.sensor = {6.0, 80};
  s.time_limit = 90.0;
  s.seed = seed;
  s.name = "gap_don";
  return s;
}

Scenario make_trap_scenario(std::uint64_t seed, bool ackermann_only) {
  Scenario s;
  s.footprint.name = "hybrid-box";
  s.footprint.shape = RectangleCover::make({{{0.0, 0.0}, {0.5, 0.25}}});

  const double wheelbase = 0.5;
  KinematicLimits ack_limits = symmetric_limits(2, 1.0, 2.0);
  ack_limits.component[1] = {-0.45, 0.45, -3.0, 3.0};
  ack_limits.steer_max = 0.45;
  KinematicLimits para_limits = symmetric_limits(1, 0.5, 1.5);
  KinematicLimits spin_limits = symmetric_limits(1, 1.0, 4.0);

  s.model = MotionModel::ackermann(wheelbase);
  s.limits = ack_limits;

  HybridSetup hybrid;
  hybrid.modes.push_back({"ackermann", MotionModel::ackermann(wheelbase), ack_limits});
  if (!ackermann_only) {
    hybrid.modes.push_back({"parallel", MotionModel::parallel(), para_limits});
    hybrid.modes.push_back({"spin", MotionModel::spin(), spin_limits});
  }
  hybrid.params.lambda_switch = 3.0;
  hybrid.params.tau_cool_max = 5;
  hybrid.params.v_min = 0.05;
  hybrid.params.omega_min = 0.05;
  hybrid.params.noise_deadzone_v = 0.01;
  hybrid.params.noise_deadzone_omega = 0.01;
  s.hybrid = hybrid;

  // The robot starts parked in a side bay barely longer than its body; the
  // only exit is a lateral slide up onto the road. Forward and reverse are
  // walled off within the safety margin, and the bay is too short to
  // shuffle out of on the steering geometry.
  s.obstacles.push_back(box_obstacle({-5.0, 0.8, 5.0, 1.1}));       // road top wall
  s.obstacles.push_back(box_obstacle({-5.0, -1.15, 2.0, -0.5}));    // bay wall west
  s.obstacles.push_back(box_obstacle({3.25, -1.15, 5.0, -0.5}));    // bay wall east
  s.obstacles.push_back(box_obstacle({1.7, -1.45, 3.55, -1.15}));   // bay floor
  s.gap = GapSpec{{2.0, -0.5}, {3.25, -0.5}};

  s.start = {2.625, -0.825, 0.0};
  s.goal = {-3.0, 0.0, 0.0};
  s.goal_tolerance = {0.3, 0.8};
  s.guidance = {{2.625, -0.825}, {2.625, 0.15}, {-3.0, 0.0}};

  s.mppi.rollouts = 384;
  s.mppi.horizon = 25;
  s.mppi.dt = 0.1;
  s.mppi.lambda = 0.6;
  s.mppi.sigma = {0.3, 0.15, 0.3};
  s.mppi.d_safe = 0.05;
  s.mppi.w_rep = 60.0;
  s.mppi.task = {0.8, 0.2, 3.0, 2.0};
  s.mppi.w_ctrl = 0.02;

  s.sensor = {5.0, 72};
  s.time_limit = 70.0;
  s.seed = seed;
  s.name = ackermann_only ? "trap_ackermann_only" : "trap_hybrid";
  return s;
}

}  // namespace exactmppi

#include "exactmppi/scenario_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace exactmppi {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path + ": " + message);
}

const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path + "/" + key, "missing required key");
  return *it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

double get_number(const json& j, const std::string& key, const std::string& path) {
  return as_number(require(j, key, path), path + "/" + key);
}

double get_number_or(const json& j, const std::string& key, const std::string& path,
                     double fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return as_number(j.at(key), path + "/" + key);
}

std::uint64_t get_seed_or(const json& j, const std::string& key, const std::string& path,
                          std::uint64_t fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    fail(path + "/" + key, "expected an integer seed");
  return v.get<std::uint64_t>();
}

Point2 as_point(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) fail(path, "expected [x, y]");
  return {as_number(j[0], path + "/0"), as_number(j[1], path + "/1")};
}

Pose2 as_pose(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) fail(path, "expected [x, y, theta]");
  return {as_number(j[0], path + "/0"), as_number(j[1], path + "/1"),
          as_number(j[2], path + "/2")};
}

std::vector<Point2> as_points(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of [x, y] pairs");
  std::vector<Point2> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(as_point(j[i], path + "/" + std::to_string(i)));
  return out;
}

FootprintSpec parse_footprint(const json& j, const std::string& path) {
  FootprintSpec spec;
  const json& name = require(j, "name", path);
  if (!name.is_string()) fail(path + "/name", "expected a string");
  spec.name = name.get<std::string>();
  const json& kind = require(j, "kind", path);
  if (!kind.is_string()) fail(path + "/kind", "expected a string");
  std::string k = kind.get<std::string>();
  try {
    if (k == "polygon") {
      spec.shape = PolygonFootprint::make(as_points(require(j, "vertices", path),
                                                    path + "/vertices"));
    } else if (k == "rectangles") {
      const json& rects = require(j, "rectangles", path);
      if (!rects.is_array() || rects.empty()) fail(path + "/rectangles", "expected a nonempty array");
      std::vector<AxisRectangle> list;
      for (std::size_t i = 0; i < rects.size(); ++i) {
        std::string rp = path + "/rectangles/" + std::to_string(i);
        list.push_back({as_point(require(rects[i], "center", rp), rp + "/center"),
                        as_point(require(rects[i], "half_extent", rp), rp + "/half_extent")});
      }
      spec.shape = RectangleCover::make(std::move(list));
    } else {
      fail(path + "/kind", "must be \"polygon\" or \"rectangles\"");
    }
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  return spec;
}

json footprint_to_json(const FootprintSpec& spec) {
  json j;
  j["name"] = spec.name;
  if (spec.is_polygon()) {
    j["kind"] = "polygon";
    json verts = json::array();
    for (Point2 v : spec.polygon().vertices()) verts.push_back({v.x, v.y});
    j["vertices"] = verts;
  } else {
    j["kind"] = "rectangles";
    json rects = json::array();
    for (const auto& r : spec.cover().rectangles) {
      rects.push_back({{"center", {r.center.x, r.center.y}},
                       {"half_extent", {r.half_extent.x, r.half_extent.y}}});
    }
    j["rectangles"] = rects;
  }
  return j;
}

MotionModel parse_model(const json& j, const std::string& path) {
  const json& type = require(j, "type", path);
  if (!type.is_string()) fail(path + "/type", "expected a string");
  std::string name = type.get<std::string>();
  double wheelbase = get_number_or(j, "wheelbase", path, 0.0);
  try {
    return model_from_name(name, wheelbase);
  } catch (const std::invalid_argument& e) {
    fail(path + "/type", e.what());
  }
}

json model_to_json(const MotionModel& model) {
  json j;
  j["type"] = model.name();
  if (model.tag == ModelTag::kAckermann) j["wheelbase"] = model.wheelbase;
  return j;
}

KinematicLimits parse_limits(const json& j, const std::string& path, int dim) {
  KinematicLimits limits = KinematicLimits::unbounded();
  auto fill = [&](const char* key, auto setter) {
    if (!j.contains(key)) return;
    const json& arr = j.at(key);
    std::string kp = path + "/" + key;
    if (!arr.is_array()) fail(kp, "expected an array");
    if (static_cast<int>(arr.size()) < dim) fail(kp, "needs one entry per control component");
    for (int i = 0; i < dim; ++i)
      setter(limits.component[static_cast<std::size_t>(i)],
             as_number(arr[static_cast<std::size_t>(i)], kp + "/" + std::to_string(i)));
  };
  fill("vel_min", [](ComponentLimit& c, double v) { c.vel_min = v; });
  fill("vel_max", [](ComponentLimit& c, double v) { c.vel_max = v; });
  fill("acc_min", [](ComponentLimit& c, double v) { c.acc_min = v; });
  fill("acc_max", [](ComponentLimit& c, double v) { c.acc_max = v; });
  limits.steer_max = get_number_or(j, "steer_max", path, limits.steer_max);
  for (int i = 0; i < dim; ++i) {
    const auto& c = limits.component[static_cast<std::size_t>(i)];
    if (c.vel_min > c.vel_max || c.acc_min > c.acc_max)
      fail(path, "limit min exceeds max for component " + std::to_string(i));
  }
  return limits;
}

json limits_to_json(const KinematicLimits& limits, int dim) {
  json j;
  json vmin = json::array(), vmax = json::array(), amin = json::array(), amax = json::array();
  for (int i = 0; i < dim; ++i) {
    const auto& c = limits.component[static_cast<std::size_t>(i)];
    vmin.push_back(c.vel_min);
    vmax.push_back(c.vel_max);
    amin.push_back(c.acc_min);
    amax.push_back(c.acc_max);
  }
  j["vel_min"] = vmin;
  j["vel_max"] = vmax;
  j["acc_min"] = amin;
  j["acc_max"] = amax;
  j["steer_max"] = limits.steer_max;
  return j;
}

MppiParams parse_mppi(const json& j, const std::string& path, int dim) {
  MppiParams p;
  p.rollouts = static_cast<int>(get_number_or(j, "rollouts", path, p.rollouts));
  p.horizon = static_cast<int>(get_number_or(j, "horizon", path, p.horizon));
  p.dt = get_number_or(j, "dt", path, p.dt);
  p.lambda = get_number_or(j, "lambda", path, p.lambda);
  if (j.contains("sigma")) {
    const json& s = j.at("sigma");
    std::string sp = path + "/sigma";
    if (!s.is_array() || static_cast<int>(s.size()) < dim)
      fail(sp, "needs one entry per control component");
    for (int i = 0; i < dim; ++i)
      p.sigma[static_cast<std::size_t>(i)] =
          as_number(s[static_cast<std::size_t>(i)], sp + "/" + std::to_string(i));
  }
  p.d_safe = get_number_or(j, "d_safe", path, p.d_safe);
  p.w_coll = get_number_or(j, "w_coll", path, p.w_coll);
  p.w_rep = get_number_or(j, "w_rep", path, p.w_rep);
  p.w_inf = get_number_or(j, "w_inf", path, p.w_inf);
  p.task.goal_pos = get_number_or(j, "w_goal_pos", path, p.task.goal_pos);
  p.task.goal_head = get_number_or(j, "w_goal_head", path, p.task.goal_head);
  p.task.xtrack = get_number_or(j, "w_xtrack", path, p.task.xtrack);
  p.task.progress = get_number_or(j, "w_progress", path, p.task.progress);
  p.w_ctrl = get_number_or(j, "w_ctrl", path, p.w_ctrl);
  p.seed = get_seed_or(j, "seed", path, p.seed);
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  return p;
}

json mppi_to_json(const MppiParams& p, int dim) {
  json j;
  j["rollouts"] = p.rollouts;
  j["horizon"] = p.horizon;
  j["dt"] = p.dt;
  j["lambda"] = p.lambda;
  json sigma = json::array();
  for (int i = 0; i < dim; ++i) sigma.push_back(p.sigma[static_cast<std::size_t>(i)]);
  j["sigma"] = sigma;
  j["d_safe"] = p.d_safe;
  j["w_coll"] = p.w_coll;
  j["w_rep"] = p.w_rep;
  j["w_inf"] = p.w_inf;
  j["w_goal_pos"] = p.task.goal_pos;
  j["w_goal_head"] = p.task.goal_head;
  j["w_xtrack"] = p.task.xtrack;
  j["w_progress"] = p.task.progress;
  j["w_ctrl"] = p.w_ctrl;
  return j;
}

Obstacle parse_obstacle(const json& j, const std::string& path) {
  Obstacle obs;
  const json& shape = require(j, "shape", path);
  std::string sp = path + "/shape";
  const json& type = require(shape, "type", sp);
  if (!type.is_string()) fail(sp + "/type", "expected a string");
  std::string t = type.get<std::string>();
  if (t == "polygon") {
    try {
      obs.shape = PolygonFootprint::make(as_points(require(shape, "vertices", sp),
                                                   sp + "/vertices"));
    } catch (const std::invalid_argument& e) {
      fail(sp, e.what());
    }
  } else if (t == "disc") {
    Disc disc;
    disc.center = as_point(require(shape, "center", sp), sp + "/center");
    disc.radius = get_number(shape, "radius", sp);
    if (disc.radius <= 0.0) fail(sp + "/radius", "must be positive");
    obs.shape = disc;
  } else {
    fail(sp + "/type", "must be \"polygon\" or \"disc\"");
  }
  if (j.contains("motion")) {
    const json& m = j.at("motion");
    std::string mp = path + "/motion";
    TrailMotion trail;
    trail.waypoints = as_points(require(m, "waypoints", mp), mp + "/waypoints");
    if (trail.waypoints.size() < 2) fail(mp + "/waypoints", "needs at least two waypoints");
    trail.speed = get_number(m, "speed", mp);
    if (trail.speed < 0.0) fail(mp + "/speed", "must be nonnegative");
    if (m.contains("ping_pong")) {
      if (!m.at("ping_pong").is_boolean()) fail(mp + "/ping_pong", "expected a boolean");
      trail.ping_pong = m.at("ping_pong").get<bool>();
    }
    obs.motion = std::move(trail);
  }
  return obs;
}

json obstacle_to_json(const Obstacle& obs) {
  json j;
  json shape;
  if (std::holds_alternative<PolygonFootprint>(obs.shape)) {
    shape["type"] = "polygon";
    json verts = json::array();
    for (Point2 v : std::get<PolygonFootprint>(obs.shape).vertices())
      verts.push_back({v.x, v.y});
    shape["vertices"] = verts;
  } else {
    const auto& disc = std::get<Disc>(obs.shape);
    shape["type"] = "disc";
    shape["center"] = {disc.center.x, disc.center.y};
    shape["radius"] = disc.radius;
  }
  j["shape"] = shape;
  if (obs.motion) {
    json m;
    json wps = json::array();
    for (Point2 w : obs.motion->waypoints) wps.push_back({w.x, w.y});
    m["waypoints"] = wps;
    m["speed"] = obs.motion->speed;
    m["ping_pong"] = obs.motion->ping_pong;
    j["motion"] = m;
  }
  return j;
}

HybridMode parse_mode(const json& j, const std::string& path) {
  HybridMode mode;
  const json& name = require(j, "name", path);
  if (!name.is_string()) fail(path + "/name", "expected a string");
  mode.name = name.get<std::string>();
  mode.model = parse_model(require(j, "model", path), path + "/model");
  if (j.contains("limits"))
    mode.limits = parse_limits(j.at("limits"), path + "/limits", mode.model.control_dim());
  else
    mode.limits = KinematicLimits::unbounded();
  return mode;
}

Scenario parse_scenario(const json& j, const std::string& origin) {
  Scenario s;
  s.name = origin;
  if (j.contains("name") && j.at("name").is_string()) s.name = j.at("name").get<std::string>();
  s.footprint = parse_footprint(require(j, "footprint", ""), "/footprint");
  s.model = parse_model(require(j, "model", ""), "/model");
  int dim = s.model.control_dim();
  s.limits = j.contains("limits") ? parse_limits(j.at("limits"), "/limits", dim)
                                  : KinematicLimits::unbounded();
  s.mppi = j.contains("mppi") ? parse_mppi(j.at("mppi"), "/mppi", dim) : MppiParams{};
  if (j.contains("hybrid")) {
    const json& h = j.at("hybrid");
    HybridSetup setup;
    const json& modes = require(h, "modes", "/hybrid");
    if (!modes.is_array() || modes.empty()) fail("/hybrid/modes", "expected a nonempty array");
    for (std::size_t i = 0; i < modes.size(); ++i)
      setup.modes.push_back(parse_mode(modes[i], "/hybrid/modes/" + std::to_string(i)));
    setup.params.lambda_switch = get_number_or(h, "lambda_switch", "/hybrid", 5.0);
    setup.params.tau_cool_max =
        static_cast<int>(get_number_or(h, "tau_cool_max", "/hybrid", 10.0));
    setup.params.v_min = get_number_or(h, "v_min", "/hybrid", 0.05);
    setup.params.omega_min = get_number_or(h, "omega_min", "/hybrid", 0.05);
    setup.params.noise_deadzone_v = get_number_or(h, "noise_deadzone_v", "/hybrid", 0.01);
    setup.params.noise_deadzone_omega =
        get_number_or(h, "noise_deadzone_omega", "/hybrid", 0.01);
    try {
      setup.params.validate();
    } catch (const std::invalid_argument& e) {
      fail("/hybrid", e.what());
    }
    s.hybrid = std::move(setup);
  }
  if (j.contains("obstacles")) {
    const json& obs = j.at("obstacles");
    if (!obs.is_array()) fail("/obstacles", "expected an array");
    for (std::size_t i = 0; i < obs.size(); ++i)
      s.obstacles.push_back(parse_obstacle(obs[i], "/obstacles/" + std::to_string(i)));
  }
  s.start = as_pose(require(j, "start", ""), "/start");
  s.goal = as_pose(require(j, "goal", ""), "/goal");
  if (j.contains("goal_tolerance")) {
    const json& g = j.at("goal_tolerance");
    s.goal_tolerance.position = get_number_or(g, "position", "/goal_tolerance", 0.3);
    s.goal_tolerance.heading = get_number_or(g, "heading", "/goal_tolerance", 0.6);
  }
  s.guidance = as_points(require(j, "guidance", ""), "/guidance");
  if (s.guidance.empty()) fail("/guidance", "needs at least one waypoint");
  if (j.contains("sensor")) {
    const json& sen = j.at("sensor");
    s.sensor.range = get_number_or(sen, "range", "/sensor", s.sensor.range);
    s.sensor.budget = static_cast<int>(get_number_or(sen, "budget", "/sensor", s.sensor.budget));
    if (s.sensor.budget < 1) fail("/sensor/budget", "must be >= 1");
    if (s.sensor.range <= 0.0) fail("/sensor/range", "must be positive");
  }
  s.time_limit = get_number_or(j, "time_limit", "", s.time_limit);
  s.seed = get_seed_or(j, "seed", "", s.seed);
  if (j.contains("gap")) {
    const json& g = j.at("gap");
    GapSpec gap;
    gap.a = as_point(require(g, "a", "/gap"), "/gap/a");
    gap.b = as_point(require(g, "b", "/gap"), "/gap/b");
    s.gap = gap;
  }
  return s;
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["footprint"] = footprint_to_json(s.footprint);
  j["model"] = model_to_json(s.model);
  int dim = s.model.control_dim();
  j["limits"] = limits_to_json(s.limits, dim);
  j["mppi"] = mppi_to_json(s.mppi, dim);
  if (s.hybrid) {
    json h;
    json modes = json::array();
    for (const auto& m : s.hybrid->modes) {
      json mj;
      mj["name"] = m.name;
      mj["model"] = model_to_json(m.model);
      mj["limits"] = limits_to_json(m.limits, m.model.control_dim());
      modes.push_back(mj);
    }
    h["modes"] = modes;
    h["lambda_switch"] = s.hybrid->params.lambda_switch;
    h["tau_cool_max"] = s.hybrid->params.tau_cool_max;
    h["v_min"] = s.hybrid->params.v_min;
    h["omega_min"] = s.hybrid->params.omega_min;
    h["noise_deadzone_v"] = s.hybrid->params.noise_deadzone_v;
    h["noise_deadzone_omega"] = s.hybrid->params.noise_deadzone_omega;
    j["hybrid"] = h;
  }
  json obs = json::array();
  for (const auto& o : s.obstacles) obs.push_back(obstacle_to_json(o));
  j["obstacles"] = obs;
  j["start"] = {s.start.x, s.start.y, s.start.theta};
  j["goal"] = {s.goal.x, s.goal.y, s.goal.theta};
  j["goal_tolerance"] = {{"position", s.goal_tolerance.position},
                         {"heading", s.goal_tolerance.heading}};
  json gd = json::array();
  for (Point2 p : s.guidance) gd.push_back({p.x, p.y});
  j["guidance"] = gd;
  j["sensor"] = {{"range", s.sensor.range}, {"budget", s.sensor.budget}};
  j["time_limit"] = s.time_limit;
  j["seed"] = s.seed;
  if (s.gap)
    j["gap"] = {{"a", {s.gap->a.x, s.gap->a.y}}, {"b", {s.gap->b.x, s.gap->b.y}}};
  return j;
}

json parse_text(const std::string& text, const std::string& origin) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ConfigError(origin + ": malformed JSON");
  return j;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError(file.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ConfigError(file.string() + ": cannot write file");
  out << text;
}

FootprintSpec footprint_from_json_text(const std::string& text, const std::string& origin) {
  return parse_footprint(parse_text(text, origin), "");
}

FootprintSpec load_footprint(const std::filesystem::path& file) {
  return footprint_from_json_text(read_text_file(file), file.string());
}

std::string footprint_to_json_text(const FootprintSpec& footprint) {
  return footprint_to_json(footprint).dump(2) + "\n";
}

Scenario scenario_from_json_text(const std::string& text, const std::string& origin) {
  return parse_scenario(parse_text(text, origin), origin);
}

Scenario load_scenario(const std::filesystem::path& file) {
  Scenario s = scenario_from_json_text(read_text_file(file), file.stem().string());
  return s;
}

std::string scenario_to_json_text(const Scenario& scenario) {
  return scenario_to_json(scenario).dump(2) + "\n";
}

std::string episode_result_to_json_text(const EpisodeResult& result, const Scenario& scenario) {
  json j;
  j["scenario"] = scenario.name;
  j["seed"] = scenario.seed;
  j["success"] = result.success;
  j["failure_kind"] = failure_kind_name(result.failure_kind);
  j["nav_time"] = result.nav_time;
  j["path_length"] = result.path_length;
  j["mean_speed"] = result.mean_speed;
  j["min_clearance"] = result.min_clearance;
  j["steps"] = result.trajectory.size();
  return j.dump(2) + "\n";
}

SuiteAggregate aggregate_results(const std::vector<EpisodeResult>& results) {
  SuiteAggregate agg;
  agg.trials = static_cast<int>(results.size());
  double time_sum = 0.0, path_sum = 0.0, speed_sum = 0.0;
  for (const auto& r : results) {
    if (r.success) {
      ++agg.successes;
      time_sum += r.nav_time;
      path_sum += r.path_length;
      speed_sum += r.mean_speed;
    }
  }
  agg.success_rate = agg.trials > 0 ? static_cast<double>(agg.successes) / agg.trials : 0.0;
  if (agg.successes > 0) {
    agg.mean_time = time_sum / agg.successes;
    agg.mean_path_length = path_sum / agg.successes;
    agg.mean_speed = speed_sum / agg.successes;
  }
  agg.results = results;
  return agg;
}

std::string suite_aggregate_to_json_text(const SuiteAggregate& aggregate,
                                         const Scenario& scenario) {
  json j;
  j["scenario"] = scenario.name;
  j["trials"] = aggregate.trials;
  j["successes"] = aggregate.successes;
  j["success_rate"] = aggregate.success_rate;
  if (aggregate.successes > 0) {
    j["mean_time"] = aggregate.mean_time;
    j["mean_path_length"] = aggregate.mean_path_length;
    j["mean_speed"] = aggregate.mean_speed;
  }
  json per = json::array();
  for (const auto& r : aggregate.results) {
    per.push_back({{"success", r.success},
                   {"failure_kind", failure_kind_name(r.failure_kind)},
                   {"nav_time", r.nav_time},
                   {"path_length", r.path_length},
                   {"mean_speed", r.mean_speed},
                   {"min_clearance", r.min_clearance}});
  }
  j["episodes"] = per;
  return j.dump(2) + "\n";
}

std::string cycle_trace_to_json_line(const CycleTrace& trace) {
  json j;
  j["cycle"] = trace.cycle;
  j["beta"] = trace.best_cost;
  j["validated"] = trace.validated;
  j["command"] = {trace.command[0], trace.command[1], trace.command[2]};
  j["min_d_horizon"] = trace.min_horizon_distance;
  if (!trace.mode.empty()) {
    j["mode"] = trace.mode;
    json costs = json::array();
    for (double c : trace.mode_costs)
      costs.push_back(std::isfinite(c) ? json(c) : json(nullptr));
    j["mode_costs"] = costs;
  }
  return j.dump() + "\n";
}

std::string trajectory_to_csv(const EpisodeResult& result) {
  std::ostringstream out;
  out << "t,x,y,theta,u0,u1,u2,d_min_planner,mode\n";
  for (const auto& row : result.trajectory) {
    out << format_double(row.t) << ',' << format_double(row.pose.x) << ','
        << format_double(row.pose.y) << ',' << format_double(row.pose.theta) << ','
        << format_double(row.command[0]) << ',' << format_double(row.command[1]) << ','
        << format_double(row.command[2]) << ',' << format_double(row.d_min_planner) << ','
        << row.mode << '\n';
  }
  return out.str();
}

}  // namespace exactmppi

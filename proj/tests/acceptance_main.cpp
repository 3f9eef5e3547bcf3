// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Heavy scenario suites run with 2 worker threads; numeric
// tolerances are asserted inline.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "exactmppi/bench.hpp"
#include "exactmppi/controller.hpp"
#include "exactmppi/rng.hpp"
#include "exactmppi/scenario_gen.hpp"
#include "exactmppi/scenario_io.hpp"
#include "exactmppi/world.hpp"

using namespace exactmppi;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

FootprintSpec fixture(const std::string& name) {
  return load_footprint(std::string(FIXTURES_DIR) + "/footprints/" + name + ".json");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct SuiteOutcome {
  int successes = 0;
  std::vector<double> times;
};

SuiteOutcome run_suite(const Scenario& base, int trials, std::uint64_t seed_base, bool hull) {
  SuiteOutcome out;
  for (int i = 0; i < trials; ++i) {
    Scenario trial = base;
    trial.seed = seed_base + static_cast<std::uint64_t>(i);
    EpisodeOptions options;
    options.threads = 2;
    options.convex_hull_wrap = hull;
    EpisodeResult r = run_episode(trial, options);
    if (r.success) {
      ++out.successes;
      out.times.push_back(r.nav_time);
    }
  }
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// --- criterion 1: polygon SDF exactness against the independent oracle ----

void criterion_1() {
  auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::string> gallery = {"t_shape", "f_shape",  "l_shape", "star",
                                            "arrow",   "diamond", "trapezoid"};
  const int kPoints = 10000;
  const int kSamples = 1000;
  double worst = 0.0;
  int sign_disagreements = 0;
  for (const auto& name : gallery) {
    auto spec = fixture(name);
    const auto& poly = spec.polygon();
    for (int i = 0; i < kPoints; ++i) {
      Point2 p{uniform_range(2024, static_cast<std::uint64_t>(i), 0, -25.0, 25.0),
               uniform_range(2024, static_cast<std::uint64_t>(i), 1, -25.0, 25.0)};
      double d = sd_polygon(p, poly);
      double oracle = oracle_sd_polygon(p, poly, kSamples);
      worst = std::max(worst, std::abs(std::abs(d) - std::abs(oracle)));
      if (std::abs(d) > 1e-3) {
        bool winding_inside = std::abs(winding_number(p, poly)) > 0.5;
        if ((d < 0.0) != winding_inside) ++sign_disagreements;
      }
    }
  }
  double elapsed = seconds_since(t0);
  bool pass = worst <= 1e-3 && sign_disagreements == 0 && elapsed < 60.0;
  std::ostringstream ss;
  ss << "SDF exactness: max ||sd|-oracle| = " << worst << " (tol 1e-3), sign disagreements = "
     << sign_disagreements << ", runtime " << elapsed << " s (< 60 s single-threaded)";
  report(1, pass, ss.str());
}

// --- criterion 2: rectangle-cover vs polygon agreement ---------------------

void criterion_2() {
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"l_shape", "l_shape_rect"}, {"t_shape", "t_shape_rect"}, {"f_shape", "f_shape_rect"}};
  double worst_exterior = 0.0;
  int sign_disagreements = 0;
  for (const auto& [poly_name, rect_name] : pairs) {
    auto poly = fixture(poly_name);
    auto rect = fixture(rect_name);
    for (int i = 0; i < 10000; ++i) {
      Point2 p{uniform_range(77, static_cast<std::uint64_t>(i), 0, -3.0, 3.0),
               uniform_range(77, static_cast<std::uint64_t>(i), 1, -3.0, 3.0)};
      double dp = signed_distance(p, poly);
      double dr = signed_distance(p, rect);
      if (dr > 0.0) worst_exterior = std::max(worst_exterior, std::abs(dp - dr));
      if (std::abs(dp) > 1e-9 && std::abs(dr) > 1e-9 && (dp < 0.0) != (dr < 0.0))
        ++sign_disagreements;
    }
  }
  bool pass = worst_exterior <= 1e-9 && sign_disagreements == 0;
  std::ostringstream ss;
  ss << "rect/polygon agreement on L/T/F: max exterior |delta| = " << worst_exterior
     << " (tol 1e-9), sign disagreements = " << sign_disagreements;
  report(2, pass, ss.str());
}

// --- criterion 3: evaluator performance shape ------------------------------

void criterion_3() {
  std::vector<FootprintSpec> specs = {fixture("l_shape"),      fixture("t_shape"),
                                      fixture("f_shape"),      fixture("l_shape_rect"),
                                      fixture("t_shape_rect"), fixture("f_shape_rect")};
  std::vector<std::size_t> counts = {100, 1000, 10000, 100000, 1000000};
  auto reportp = scaling_benchmark(specs, counts, 8, 11, {1});

  auto mean_at = [&](const std::string& name, std::size_t count) {
    for (const auto& row : reportp.rows)
      if (row.footprint == name && row.queries == count) return row.median_us;
    return -1.0;
  };

  bool slopes_ok = true;
  double worst_slope_lo = 1.0, worst_slope_hi = 1.0;
  for (const auto& spec : specs) {
    double t4 = mean_at(spec.name, 10000);
    double t6 = mean_at(spec.name, 1000000);
    double slope = std::log10(t6 / t4) / 2.0;
    worst_slope_lo = std::min(worst_slope_lo, slope);
    worst_slope_hi = std::max(worst_slope_hi, slope);
    if (slope < 0.75 || slope > 1.25) slopes_ok = false;
  }

  bool speedups_ok = true;
  double min_speedup = 1e9;
  for (const auto& shape : {"l_shape", "t_shape", "f_shape"}) {
    double poly_t = mean_at(shape, 100000);
    double rect_t = mean_at(std::string(shape) + "_rect", 100000);
    double speedup = poly_t / rect_t;
    min_speedup = std::min(min_speedup, speedup);
    if (speedup < 1.5) speedups_ok = false;
  }

  bool pass = slopes_ok && speedups_ok;
  std::ostringstream ss;
  ss << "scaling: log-log slope in [" << worst_slope_lo << ", " << worst_slope_hi
     << "] (need 1.0 +/- 0.25 on top two decades); rect-cover speedup at 1e5 queries >= "
     << min_speedup << "x (need >= 1.5x on L/T/F)";
  report(3, pass, ss.str());
}

// --- criterion 4: omni gap feasibility pattern -----------------------------

void criterion_4() {
  auto t0 = std::chrono::steady_clock::now();
  auto l_shape = fixture("l_shape");

  Scenario hard = make_gap_scenario(l_shape, 1.05, 1);
  Scenario easy = make_gap_scenario(l_shape, 0.83, 1);
  auto hard_exact = run_suite(hard, 10, 1, false);
  auto hard_hull = run_suite(hard, 10, 1, true);
  auto easy_exact = run_suite(easy, 10, 1, false);
  auto easy_hull = run_suite(easy, 10, 1, true);
  double elapsed = seconds_since(t0);

  bool pass = hard_exact.successes >= 8 && hard_hull.successes == 0 &&
              easy_exact.successes >= 9 && easy_hull.successes >= 9 && elapsed < 600.0;
  std::ostringstream ss;
  ss << "omni gap (L-shape): DoN 1.05 exact " << hard_exact.successes
     << "/10 (need >= 8), hull " << hard_hull.successes << "/10 (need 0); DoN 0.83 exact "
     << easy_exact.successes << "/10, hull " << easy_hull.successes
     << "/10 (both need >= 9); runtime " << elapsed << " s (< 600 s)";
  report(4, pass, ss.str());
}

// --- criterion 5: corridor DoN sweep pattern -------------------------------

void criterion_5() {
  auto t_shape = fixture("t_shape");
  std::ostringstream ss;
  ss << "corridor DoN sweep (T-shape):";
  bool pass = true;
  for (double don : {0.6, 0.8, 1.0}) {
    Scenario scenario = make_corridor_scenario(t_shape, don, 1);
    auto exact = run_suite(scenario, 10, 1, false);
    auto hull = run_suite(scenario, 10, 1, true);
    double exact_rate = exact.successes / 10.0;
    double hull_rate = hull.successes / 10.0;
    if (exact_rate < 0.8) pass = false;
    if (don < 0.9 && hull_rate < 0.8) pass = false;
    if (don > 0.9 && hull.successes != 0) pass = false;
    ss << " DoN " << don << ": exact " << exact.successes << "/10, hull " << hull.successes
       << "/10;";
  }
  ss << " (exact >= 0.8 everywhere; hull >= 0.8 at 0.6/0.8 and 0 at 1.0)";
  report(5, pass, ss.str());
}

// --- criterion 6: MPPI unit properties -------------------------------------

void criterion_6() {
  auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  std::ostringstream notes;

  // Weight normalization and shift invariance.
  std::vector<double> costs;
  for (int i = 0; i < 400; ++i)
    costs.push_back(uniform_range(5, static_cast<std::uint64_t>(i), 0, -50.0, 50.0));
  auto w = weights_from_costs(costs, 0.9);
  double sum = 0.0;
  for (double x : w) sum += x;
  if (std::abs(sum - 1.0) > 1e-12) {
    pass = false;
    notes << " normalization violated;";
  }
  std::vector<double> shifted = costs;
  for (double& c : shifted) c += 7777.0;
  auto ws = weights_from_costs(shifted, 0.9);
  for (std::size_t i = 0; i < w.size(); ++i)
    if (std::abs(w[i] - ws[i]) > 1e-12) {
      pass = false;
      notes << " shift invariance violated;";
      break;
    }

  // Unsafe-mass suppression with w_inf = 1e9, lambda = 1e3.
  std::vector<double> augmented = costs;
  double unsafe_mass = 0.0;
  for (std::size_t i = 0; i < augmented.size(); i += 2) augmented[i] += 1e9;
  auto wu = weights_from_costs(augmented, 1e3);
  for (std::size_t i = 0; i < wu.size(); i += 2) unsafe_mass += wu[i];
  if (unsafe_mass >= 1e-6) {
    pass = false;
    notes << " unsafe mass " << unsafe_mass << ";";
  }

  // K=1 batch/scalar equivalence at 1e-9.
  {
    auto model = MotionModel::diff();
    FootprintSpec square;
    square.name = "sq";
    square.shape = PolygonFootprint::make({{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}});
    auto prepared = prepare(square);
    KinematicLimits limits = KinematicLimits::unbounded();
    limits.component[0] = {-1.5, 1.5, -3.0, 3.0};
    limits.component[1] = {-1.0, 1.0, -6.0, 6.0};
    MppiParams params;
    params.rollouts = 1;
    params.horizon = 20;
    params.seed = 3;
    Guidance guidance;
    guidance.path = {{0, 0}, {5, 0}};
    guidance.goal = {5, 0, 0};
    auto obstacles = ObstacleSet::padded(std::vector<Point2>{{2.0, 0.4}, {3.0, -0.6}}, 8);
    auto nominal = NominalSequence::constant([&] {
      ControlInput u = ControlInput::zero(model);
      u[0] = 0.6;
      return u;
    }(), 20);
    auto eps = sample_perturbations(params.seed, 0, model, params);
    auto u0 = ControlInput::zero(model);
    auto batch = evaluate_rollouts({0, 0, 0}, nominal, eps, obstacles, prepared, model, limits,
                                   params, guidance, u0, 2);
    // Scalar reference loop.
    Pose2 q{0, 0, 0};
    ControlInput prev = u0;
    double cost = 0.0;
    for (int h = 0; h < 20; ++h) {
      ControlInput u = nominal.controls[static_cast<std::size_t>(h)];
      for (int c = 0; c < u.dim; ++c) u[c] += eps[static_cast<std::size_t>(h)][c];
      u = clamp_control(model, u, prev, limits, params.dt);
      prev = u;
      double d = min_signed_distance(square, transform_to_body(obstacles, q));
      cost += task_cost(q, u, guidance, params.task, false) + control_cost(u, params) +
              obstacle_cost(d, params);
      if (std::abs(d - batch.d_min[batch.at(0, h)]) > 1e-9) pass = false;
      q = step(model, q, u, params.dt);
    }
    cost += terminal_goal_cost(q, guidance, params.task);
    if (std::abs(cost - batch.costs[0]) > 1e-9) {
      pass = false;
      notes << " batch/scalar mismatch " << std::abs(cost - batch.costs[0]) << ";";
    }
  }

  // Safe-stop soundness and full-cycle determinism.
  {
    auto model = MotionModel::diff();
    FootprintSpec square;
    square.name = "sq";
    square.shape = PolygonFootprint::make({{-0.4, -0.4}, {0.4, -0.4}, {0.4, 0.4}, {-0.4, 0.4}});
    KinematicLimits limits = KinematicLimits::unbounded();
    limits.component[0] = {-1.5, 1.5, -3.0, 3.0};
    limits.component[1] = {-1.0, 1.0, -6.0, 6.0};
    MppiParams params;
    params.rollouts = 64;
    params.horizon = 12;
    params.seed = 5;
    Guidance guidance;
    guidance.path = {{0, 0}, {4, 0}};
    guidance.goal = {4, 0, 0};

    std::vector<Point2> ring;
    for (int k = 0; k < 32; ++k) {
      double ang = 2.0 * std::numbers::pi * k / 32;
      ring.push_back({0.45 * std::cos(ang), 0.45 * std::sin(ang)});
    }
    MppiController enclosed(model, limits, square, params);
    auto stop = enclosed.control_cycle({0, 0, 0}, ObstacleSet::padded(ring, 64), guidance);
    if (stop.validated) {
      pass = false;
      notes << " enclosure not detected;";
    }
    for (int c = 0; c < 2; ++c)
      if (stop.command[c] != 0.0) {
        pass = false;
        notes << " safe-stop emitted nonzero command;";
      }
    for (const auto& u : stop.nominal.controls)
      for (int c = 0; c < 2; ++c)
        if (u[c] != 0.0) {
          pass = false;
          notes << " safe-stop nominal not zeroed;";
          c = 2;
          break;
        }

    auto obstacles = ObstacleSet::padded(std::vector<Point2>{{1.5, 0.3}}, 16);
    MppiController a(model, limits, square, params);
    MppiController b(model, limits, square, params);
    for (int cycle = 0; cycle < 3; ++cycle) {
      auto da = a.control_cycle({0, 0, 0}, obstacles, guidance);
      auto db = b.control_cycle({0, 0, 0}, obstacles, guidance);
      for (int c = 0; c < 2; ++c)
        if (da.command[c] != db.command[c]) {
          pass = false;
          notes << " nondeterministic cycle;";
        }
    }
  }

  double elapsed = seconds_since(t0);
  if (elapsed >= 30.0) pass = false;
  std::ostringstream ss;
  ss << "MPPI unit properties (normalization, shift invariance, unsafe suppression, "
        "batch/scalar, safe stop, determinism):"
     << (notes.str().empty() ? " all hold" : notes.str()) << "; runtime " << elapsed
     << " s (< 30 s)";
  report(6, pass, ss.str());
}

// --- criterion 7: hybrid trap ablation --------------------------------------

void criterion_7() {
  Scenario hybrid = make_trap_scenario(1, false);
  Scenario ack_only = make_trap_scenario(1, true);
  auto hybrid_out = run_suite(hybrid, 10, 1, false);
  auto ack_out = run_suite(ack_only, 10, 1, false);

  double hybrid_median = median(hybrid_out.times);
  double ack_median = median(ack_out.times);
  bool ablation_ok = ack_out.successes == 0 ||
                     (hybrid_median > 0.0 && ack_median >= 1.2 * hybrid_median);
  bool pass = hybrid_out.successes >= 8 && ablation_ok;
  std::ostringstream ss;
  ss << "hybrid trap: hybrid " << hybrid_out.successes << "/10 (need >= 8, median "
     << hybrid_median << " s); ackermann-only " << ack_out.successes << "/10";
  if (ack_out.successes > 0) ss << " (median " << ack_median << " s, need >= 1.2x hybrid)";
  else ss << " (fails outright)";
  report(7, pass, ss.str());
}

// --- criterion 8: end-to-end determinism over the CLI ----------------------

void criterion_8() {
  fs::path out_a = fs::path("acceptance_out") / "det_a";
  fs::path out_b = fs::path("acceptance_out") / "det_b";
  fs::create_directories(out_a);
  fs::create_directories(out_b);
  const std::vector<std::string> scenarios = {"open_field", "goal_behind_wall",
                                              "corridor_don080", "omni_gap_don105",
                                              "trap_hybrid"};
  bool pass = true;
  std::ostringstream ss;
  ss << "cmd_run determinism:";
  for (const auto& name : scenarios) {
    std::string scenario_file =
        std::string(FIXTURES_DIR) + "/scenarios/" + name + ".json";
    auto invoke = [&](const fs::path& dir, int threads) {
      std::ostringstream cmd;
      cmd << CLI_BINARY << " run " << scenario_file << " --seed 42 --threads " << threads
          << " --out " << dir.string() << " > /dev/null 2>&1";
      return std::system(cmd.str().c_str());
    };
    int rc_a = invoke(out_a, 2);
    int rc_b = invoke(out_b, 1);
    bool ran = rc_a != -1 && rc_b != -1;
    // Each directory holds exactly one trajectory; thread count must not
    // matter either.
    auto find_csv = [](const fs::path& dir) {
      std::error_code ec;
      for (const auto& entry : fs::directory_iterator(dir, ec))
        if (entry.path().string().find("_trajectory.csv") != std::string::npos)
          return entry.path();
      return fs::path{};
    };
    fs::path file_a = find_csv(out_a);
    fs::path file_b = find_csv(out_b);
    std::string csv_a, csv_b;
    if (!file_a.empty() && !file_b.empty()) {
      csv_a = read_text_file(file_a);
      csv_b = read_text_file(file_b);
    }
    bool same = ran && !csv_a.empty() && csv_a == csv_b;
    if (!same) pass = false;
    ss << ' ' << name << (same ? " ok;" : " MISMATCH;");
    fs::remove_all(out_a);
    fs::remove_all(out_b);
    fs::create_directories(out_a);
    fs::create_directories(out_b);
  }
  report(8, pass, ss.str());
}

// --- criterion 9: kinematics fidelity ---------------------------------------

void criterion_9() {
  bool pass = true;
  std::ostringstream notes;

  auto diff = MotionModel::diff();
  std::vector<ControlInput> arc(100, [&] {
    ControlInput u = ControlInput::zero(diff);
    u[0] = 1.0;
    u[1] = 1.0;
    return u;
  }());
  auto traj = rollout(diff, {0, 0, 0}, arc, 0.01);
  double err = std::hypot(traj.back().x - std::sin(1.0), traj.back().y - (1.0 - std::cos(1.0)));
  if (err >= 0.02) {
    pass = false;
    notes << " Euler arc error " << err << ";";
  }

  std::vector<MotionModel> models = {MotionModel::diff(), MotionModel::ackermann(0.7),
                                     MotionModel::omni(), MotionModel::spin(),
                                     MotionModel::parallel()};
  Pose2 g{1.1, -0.7, 0.8};
  double cg = std::cos(g.theta), sg = std::sin(g.theta);
  double worst_equiv = 0.0;
  for (const auto& model : models) {
    std::vector<ControlInput> controls;
    for (int h = 0; h < 25; ++h) {
      ControlInput u = ControlInput::zero(model);
      for (int c = 0; c < u.dim; ++c)
        u[c] = uniform_range(9, static_cast<std::uint64_t>(h), static_cast<std::uint64_t>(c),
                             -0.7, 0.7);
      controls.push_back(u);
    }
    Pose2 q0{0.3, 0.1, 0.2};
    auto base = rollout(model, q0, controls, 0.1);
    Pose2 gq0{g.x + cg * q0.x - sg * q0.y, g.y + sg * q0.x + cg * q0.y, q0.theta + g.theta};
    auto moved = rollout(model, gq0, controls, 0.1);
    for (std::size_t i = 0; i < base.size(); ++i) {
      Pose2 expect{g.x + cg * base[i].x - sg * base[i].y, g.y + sg * base[i].x + cg * base[i].y,
                   base[i].theta + g.theta};
      worst_equiv = std::max({worst_equiv, std::abs(moved[i].x - expect.x),
                              std::abs(moved[i].y - expect.y),
                              std::abs(moved[i].theta - expect.theta)});
    }
  }
  if (worst_equiv > 1e-9) {
    pass = false;
    notes << " equivariance error " << worst_equiv << ";";
  }

  std::ostringstream ss;
  ss << "kinematics: Euler unicycle arc error " << err
     << " (< 0.02 m at dt=0.01 over 1 rad); frame equivariance worst error " << worst_equiv
     << " (<= 1e-9, all five models)";
  report(9, pass, ss.str());
}

}  // namespace

int main() {
  std::printf("acceptance suite (fixtures: %s)\n", FIXTURES_DIR);
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_6();
  criterion_9();
  criterion_8();
  criterion_7();
  criterion_4();
  criterion_5();
  std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}

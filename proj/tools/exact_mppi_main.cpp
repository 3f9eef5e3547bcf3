#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "exactmppi/bench.hpp"
#include "exactmppi/scenario_gen.hpp"
#include "exactmppi/scenario_io.hpp"
#include "exactmppi/svg.hpp"
#include "exactmppi/world.hpp"

namespace fs = std::filesystem;
using namespace exactmppi;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitNavFailure = 2;

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  fs::path out_dir = ".";
  int threads = 1;
};

Scenario load_or_generate(const std::string& scenario_path, const std::string& tmpl, double don,
                          const std::string& footprint_path, const GlobalOptions& global) {
  Scenario scenario;
  if (!scenario_path.empty()) {
    scenario = load_scenario(scenario_path);
  } else if (!tmpl.empty()) {
    if (footprint_path.empty() && tmpl != "trap")
      throw ConfigError("--footprint is required with --template");
    std::uint64_t seed = global.seed.value_or(1);
    if (tmpl == "corridor") {
      scenario = make_corridor_scenario(load_footprint(footprint_path), don, seed);
    } else if (tmpl == "gap") {
      scenario = make_gap_scenario(load_footprint(footprint_path), don, seed);
    } else if (tmpl == "trap") {
      scenario = make_trap_scenario(seed);
    } else {
      throw ConfigError("unknown template: " + tmpl);
    }
  } else {
    throw ConfigError("either a scenario file or --template is required");
  }
  if (global.seed) {
    scenario.seed = *global.seed;
  }
  return scenario;
}

int run_one(const Scenario& scenario, const GlobalOptions& global, bool convex_hull,
            bool emit_svg, const std::string& diag_path) {
  EpisodeOptions options;
  options.threads = global.threads;
  options.convex_hull_wrap = convex_hull;
  std::ostringstream diag;
  if (!diag_path.empty())
    options.diagnostics_sink = [&diag](const CycleTrace& trace) {
      diag << cycle_trace_to_json_line(trace);
    };
  EpisodeResult result = run_episode(scenario, options);
  if (!diag_path.empty()) write_text_file(diag_path, diag.str());

  fs::create_directories(global.out_dir);
  fs::path base = global.out_dir / scenario.name;
  write_text_file(base.string() + "_trajectory.csv", trajectory_to_csv(result));
  write_text_file(base.string() + "_result.json",
                  episode_result_to_json_text(result, scenario));
  if (emit_svg) write_text_file(base.string() + "_run.svg", scenario_svg(scenario, &result));

  std::cout << (result.success ? "success" : "failure") << " ("
            << failure_kind_name(result.failure_kind) << ") time=" << result.nav_time
            << "s path=" << result.path_length << "m clearance=" << result.min_clearance
            << "m\n";
  return result.success ? kExitOk : kExitNavFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Footprint-aware sampling-based local navigation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalOptions global;
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Seed override for all randomness");
  app.add_option("--out", global.out_dir, "Output directory");
  app.add_option("--threads", global.threads, "Worker threads for batched evaluation")
      ->envname("EXACT_MPPI_THREADS");

  // run
  auto* run = app.add_subcommand("run", "Run one episode from a scenario file");
  std::string run_scenario, run_diag;
  bool run_svg = false;
  bool run_hull = false;
  run->add_option("scenario", run_scenario, "Scenario JSON file")->required();
  run->add_flag("--svg", run_svg, "Also write an SVG plot of the episode");
  run->add_flag("--convex-hull", run_hull, "Replace the footprint by its convex hull");
  run->add_option("--diag", run_diag, "Write per-cycle diagnostics JSONL to this file");

  // suite
  auto* suite = app.add_subcommand("suite", "Run a suite of seeded episodes");
  std::string suite_scenario, suite_template, suite_footprint;
  double suite_don = 0.8;
  int suite_trials = 10;
  std::uint64_t suite_seed_base = 1;
  bool suite_hull = false;
  suite->add_option("scenario", suite_scenario, "Scenario JSON file");
  suite->add_option("--template", suite_template, "Generate instead: corridor|gap|trap");
  suite->add_option("--don", suite_don, "Degree of narrowness for --template");
  suite->add_option("--footprint", suite_footprint, "Footprint JSON for --template");
  suite->add_option("--trials", suite_trials, "Number of seeded episodes")->check(CLI::PositiveNumber);
  suite->add_option("--seeds", suite_seed_base, "Base seed; trial i uses base+i");
  suite->add_flag("--convex-hull", suite_hull, "Replace the footprint by its convex hull");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a scenario from a DoN target");
  std::string gen_template = "corridor", gen_footprint, gen_out;
  double gen_don = 0.8;
  gen->add_option("--template", gen_template, "corridor|gap|trap")->required();
  gen->add_option("--don", gen_don, "Degree of narrowness target");
  gen->add_option("--footprint", gen_footprint, "Footprint JSON file");
  gen->add_option("--out-file", gen_out, "Output scenario path (default <out>/<template>.json)");

  // bench
  auto* bench = app.add_subcommand("bench", "Signed-distance evaluator scaling benchmark");
  std::string bench_dir;
  std::vector<std::size_t> bench_counts{100, 1000, 10000, 100000, 1000000};
  int bench_trials = 50;
  bench->add_option("--footprints", bench_dir, "Directory of footprint JSON files")->required();
  bench->add_option("--counts", bench_counts, "Ascending query counts");
  bench->add_option("--trials", bench_trials, "Timed trials per configuration")
      ->check(CLI::PositiveNumber);

  // sdf
  auto* sdf = app.add_subcommand("sdf", "Signed-distance field heatmap for a footprint");
  std::string sdf_footprint;
  std::vector<double> sdf_bounds{-2.0, -2.0, 2.0, 2.0};
  double sdf_res = 0.02;
  sdf->add_option("--footprint", sdf_footprint, "Footprint JSON file")->required();
  sdf->add_option("--bounds", sdf_bounds, "x0 y0 x1 y1")->expected(4);
  sdf->add_option("--res", sdf_res, "Cell size in meters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  if (seed_opt->count() > 0) global.seed = seed_value;
  if (global.threads < 1) global.threads = 1;

  try {
    if (run->parsed()) {
      Scenario scenario = load_or_generate(run_scenario, "", 0.0, "", global);
      return run_one(scenario, global, run_hull, run_svg, run_diag);
    }

    if (suite->parsed()) {
      Scenario base = load_or_generate(suite_scenario, suite_template, suite_don, suite_footprint,
                                       global);
      std::vector<EpisodeResult> results;
      for (int i = 0; i < suite_trials; ++i) {
        Scenario trial = base;
        trial.seed = suite_seed_base + static_cast<std::uint64_t>(i);
        EpisodeOptions options;
        options.threads = global.threads;
        options.convex_hull_wrap = suite_hull;
        results.push_back(run_episode(trial, options));
      }
      auto agg = aggregate_results(results);
      fs::create_directories(global.out_dir);
      fs::path out = global.out_dir / (base.name + "_suite.json");
      write_text_file(out, suite_aggregate_to_json_text(agg, base));
      std::cout << "success_rate=" << agg.success_rate << " (" << agg.successes << "/"
                << agg.trials << ") -> " << out.string() << "\n";
      return kExitOk;
    }

    if (gen->parsed()) {
      if (gen_don <= 0.0 || gen_don > 1.2)
        throw ConfigError("--don must lie in (0, 1.2]");
      Scenario scenario;
      std::uint64_t seed = global.seed.value_or(1);
      if (gen_template == "corridor") {
        if (gen_footprint.empty()) throw ConfigError("--footprint required for corridor");
        scenario = make_corridor_scenario(load_footprint(gen_footprint), gen_don, seed);
      } else if (gen_template == "gap") {
        if (gen_footprint.empty()) throw ConfigError("--footprint required for gap");
        scenario = make_gap_scenario(load_footprint(gen_footprint), gen_don, seed);
      } else if (gen_template == "trap") {
        scenario = make_trap_scenario(seed);
      } else {
        throw ConfigError("unknown template: " + gen_template);
      }
      fs::create_directories(global.out_dir);
      fs::path out = gen_out.empty() ? global.out_dir / (gen_template + ".json")
                                     : fs::path(gen_out);
      write_text_file(out, scenario_to_json_text(scenario));
      double don_check = compute_don(scenario, scenario.footprint);
      std::cout << "wrote " << out.string() << " (DoN=" << don_check << ")\n";
      return kExitOk;
    }

    if (bench->parsed()) {
      std::vector<FootprintSpec> specs;
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(bench_dir))
        if (entry.path().extension() == ".json") files.push_back(entry.path());
      std::sort(files.begin(), files.end());
      if (files.empty()) throw ConfigError(bench_dir + ": no footprint JSON files found");
      for (const auto& f : files) specs.push_back(load_footprint(f));
      std::vector<int> thread_settings{1};
      if (global.threads > 1) thread_settings.push_back(global.threads);
      auto report = scaling_benchmark(specs, bench_counts, bench_trials,
                                      global.seed.value_or(0), thread_settings);
      fs::create_directories(global.out_dir);
      fs::path out = global.out_dir / "bench.csv";
      write_text_file(out, report.to_csv());
      std::cout << "wrote " << out.string() << " (" << report.rows.size() << " rows)\n";
      return kExitOk;
    }

    if (sdf->parsed()) {
      FootprintSpec footprint = load_footprint(sdf_footprint);
      GridBounds bounds{{sdf_bounds[0], sdf_bounds[1]}, {sdf_bounds[2], sdf_bounds[3]}};
      SdfGrid grid = sdf_grid(footprint, bounds, sdf_res);
      fs::create_directories(global.out_dir);
      fs::path out = global.out_dir / (footprint.name + "_sdf.svg");
      write_text_file(out, sdf_svg(footprint, grid));
      std::cout << "wrote " << out.string() << " (" << grid.nx << "x" << grid.ny << ")\n";
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitConfigError;
}

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "exactmppi/world.hpp"

namespace exactmppi {

/// Schema violation; the message carries a JSON-pointer path.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

FootprintSpec load_footprint(const std::filesystem::path& file);
FootprintSpec footprint_from_json_text(const std::string& text, const std::string& origin);
std::string footprint_to_json_text(const FootprintSpec& footprint);

Scenario load_scenario(const std::filesystem::path& file);
Scenario scenario_from_json_text(const std::string& text, const std::string& origin);
std::string scenario_to_json_text(const Scenario& scenario);

std::string episode_result_to_json_text(const EpisodeResult& result, const Scenario& scenario);

struct SuiteAggregate {
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  // Means over successful trials; meaningless when successes == 0.
  double mean_time = 0.0;
  double mean_path_length = 0.0;
  double mean_speed = 0.0;
  std::vector<EpisodeResult> results;
};

SuiteAggregate aggregate_results(const std::vector<EpisodeResult>& results);
std::string suite_aggregate_to_json_text(const SuiteAggregate& aggregate,
                                         const Scenario& scenario);

/// Columns: t,x,y,theta,u0,u1,u2,d_min_planner,mode. Byte-stable formatting.
std::string trajectory_to_csv(const EpisodeResult& result);

/// One compact JSON object per control cycle (JSONL-friendly).
std::string cycle_trace_to_json_line(const CycleTrace& trace);

void write_text_file(const std::filesystem::path& file, const std::string& text);
std::string read_text_file(const std::filesystem::path& file);

}  // namespace exactmppi

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "exactmppi/geometry.hpp"

namespace exactmppi {

/// Winding number by angle accumulation (independent of the ray cast used by
/// sd_polygon). |w| > 0.5 means inside.
double winding_number(Point2 p, const PolygonFootprint& poly);

/// Independent signed-distance oracle: sign from the winding number,
/// magnitude from dense per-edge boundary samples (error <= edge/samples).
double oracle_sd_polygon(Point2 p, const PolygonFootprint& poly, int samples_per_edge);

struct BenchRow {
  std::string footprint;
  std::string evaluator;  // "rect_cover" | "polygon"
  std::size_t queries = 0;
  int trials = 0;
  double mean_us = 0.0;
  double std_us = 0.0;
  double median_us = 0.0;
  int threads = 1;
};

struct BenchReport {
  std::vector<BenchRow> rows;

  std::string to_csv() const;
};

/// Seeded uniform queries in a square region centered on the origin.
std::vector<Point2> benchmark_queries(std::size_t count, double region_side, std::uint64_t seed);

/// Per-call wall time of batch signed-distance evaluation over growing query
/// counts; 3 warm-up iterations excluded, one row per
/// (footprint, count, thread setting).
BenchReport scaling_benchmark(const std::vector<FootprintSpec>& footprints,
                              const std::vector<std::size_t>& query_counts, int trials,
                              std::uint64_t seed = 0,
                              const std::vector<int>& thread_settings = {1});

}  // namespace exactmppi

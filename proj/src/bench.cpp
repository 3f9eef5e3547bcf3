#include "exactmppi/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "exactmppi/rng.hpp"

namespace exactmppi {

double winding_number(Point2 p, const PolygonFootprint& poly) {
  const auto& verts = poly.vertices();
  const std::size_t n = verts.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Point2 a = verts[i] - p;
    Point2 b = verts[(i + 1) % n] - p;
    total += std::atan2(cross(a, b), dot(a, b));
  }
  return total / (2.0 * std::numbers::pi);
}

double oracle_sd_polygon(Point2 p, const PolygonFootprint& poly, int samples_per_edge) {
  if (samples_per_edge < 2) throw std::invalid_argument("oracle needs >= 2 samples per edge");
  const auto& verts = poly.vertices();
  const std::size_t n = verts.size();
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    Point2 a = verts[i];
    Point2 b = verts[(i + 1) % n];
    for (int k = 0; k < samples_per_edge; ++k) {
      double t = static_cast<double>(k) / (samples_per_edge - 1);
      Point2 s = a + t * (b - a);
      d = std::min(d, norm(p - s));
    }
  }
  bool inside = std::abs(winding_number(p, poly)) > 0.5;
  return inside ? -d : d;
}

std::vector<Point2> benchmark_queries(std::size_t count, double region_side, std::uint64_t seed) {
  std::vector<Point2> pts;
  pts.reserve(count);
  double half = region_side / 2.0;
  for (std::size_t i = 0; i < count; ++i)
    pts.push_back({uniform_range(seed, i, 0, -half, half), uniform_range(seed, i, 1, -half, half)});
  return pts;
}

std::string BenchReport::to_csv() const {
  std::ostringstream out;
  out << "footprint,evaluator,queries,trials,mean_us,std_us,median_us,threads\n";
  char buf[64];
  for (const auto& r : rows) {
    out << r.footprint << ',' << r.evaluator << ',' << r.queries << ',' << r.trials << ',';
    std::snprintf(buf, sizeof(buf), "%.3f,%.3f,%.3f", r.mean_us, r.std_us, r.median_us);
    out << buf << ',' << r.threads << '\n';
  }
  return out.str();
}

BenchReport scaling_benchmark(const std::vector<FootprintSpec>& footprints,
                              const std::vector<std::size_t>& query_counts, int trials,
                              std::uint64_t seed, const std::vector<int>& thread_settings) {
  if (trials < 1) throw std::invalid_argument("benchmark needs trials >= 1");
  for (std::size_t i = 1; i < query_counts.size(); ++i)
    if (query_counts[i] < query_counts[i - 1])
      throw std::invalid_argument("query counts must be ascending");

  constexpr int kWarmup = 3;
  BenchReport report;
  std::vector<double> out_buffer;
  for (const auto& spec : footprints) {
    PreparedFootprint prepared = prepare(spec);
    const char* evaluator = spec.is_polygon() ? "polygon" : "rect_cover";
    for (std::size_t count : query_counts) {
      auto queries = benchmark_queries(count, 50.0, hash_combine(seed, count));
      out_buffer.resize(count);
      for (int threads : thread_settings) {
        for (int w = 0; w < kWarmup; ++w)
          batch_signed_distance(queries, prepared, out_buffer, threads);
        std::vector<double> samples_us;
        samples_us.reserve(static_cast<std::size_t>(trials));
        for (int trial = 0; trial < trials; ++trial) {
          auto t0 = std::chrono::steady_clock::now();
          batch_signed_distance(queries, prepared, out_buffer, threads);
          auto t1 = std::chrono::steady_clock::now();
          samples_us.push_back(
              std::chrono::duration<double, std::micro>(t1 - t0).count());
        }
        double mean = 0.0;
        for (double s : samples_us) mean += s;
        mean /= static_cast<double>(samples_us.size());
        double var = 0.0;
        for (double s : samples_us) var += (s - mean) * (s - mean);
        var /= static_cast<double>(samples_us.size());
        std::vector<double> sorted = samples_us;
        std::sort(sorted.begin(), sorted.end());
        double median = sorted[sorted.size() / 2];
        if (sorted.size() % 2 == 0)
          median = 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
        report.rows.push_back({spec.name, evaluator, count, trials, mean, std::sqrt(var), median,
                               threads});
      }
    }
  }
  return report;
}

}  // namespace exactmppi

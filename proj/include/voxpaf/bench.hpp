#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "voxpaf/config.hpp"

namespace voxpaf {

// Scaling benchmark over synthetic workloads. Per stage and workload the
// harness reports the median of `iterations` wall-clock samples; short
// stages are repeated in an inner loop sized so one sample spans roughly
// `target_sample_ms` of work. Samples are taken in rounds interleaved
// across the workloads of one people count, so slow machine drift moves
// every view count alike instead of skewing the ones measured later.
struct BenchParams {
  std::vector<int> views = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<int> people = {1, 2, 5, 10};
  int iterations = 7;
  double target_sample_ms = 12.0;
  int threads = 1;  // single-threaded by default for stable medians
  std::uint64_t seed = 0;
  PipelineConfig config;
};

struct BenchEntry {
  std::string stage;  // "unproject", "detect" or "decode"
  int views = 0;
  int people = 0;
  double median_ms = 0.0;
  int inner_reps = 1;
};

struct BenchReport {
  int iterations = 0;
  int threads = 0;
  std::uint64_t seed = 0;
  std::vector<BenchEntry> entries;
};

// Unprojection consumes the per-view maps, so its cost grows with the view
// count; detection and decoding operate on fixed-size volumes rendered from
// the same scene, so their cost does not.
BenchReport run_bench(const BenchParams& params);

std::string bench_to_json(const BenchReport& report);

// Coefficient of determination of the least-squares line through (x, y);
// 1.0 means perfectly linear.
double linear_fit_r2(std::span<const double> xs, std::span<const double> ys);

}  // namespace voxpaf

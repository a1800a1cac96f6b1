#include "voxpaf/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>

#include <json.hpp>

#include "voxpaf/synth.hpp"

namespace voxpaf {

namespace {

using ordered_json = nlohmann::ordered_json;
using clock_type = std::chrono::steady_clock;

double elapsed_ms(clock_type::time_point t0, clock_type::time_point t1) {
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

// One workload being timed: the closure plus its collected samples.
struct StageRun {
  BenchEntry entry;
  std::function<void()> fn;
  std::vector<double> samples;
};

// Milliseconds per run, averaged over `reps` back-to-back runs.
double time_once(const std::function<void()>& fn, int reps) {
  const auto t0 = clock_type::now();
  for (int k = 0; k < reps; ++k) fn();
  return elapsed_ms(t0, clock_type::now()) / reps;
}

// Sizes the inner-repeat count so one sample spans about `target_ms`, from
// the fastest of three calibration runs (the fastest run is the least
// contaminated by scheduler interference).
void calibrate(StageRun& run, int iterations, double target_ms) {
  run.fn();  // warm-up, excluded from every measurement
  double estimate = time_once(run.fn, 1);
  for (int k = 0; k < 2; ++k) estimate = std::min(estimate, time_once(run.fn, 1));
  estimate = std::max(estimate, 1e-4);
  run.entry.inner_reps = static_cast<int>(std::clamp(std::ceil(target_ms / estimate), 1.0, 100000.0));
  run.samples.reserve(static_cast<std::size_t>(iterations));
}

double median_of(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const std::size_t mid = samples.size() / 2;
  return samples.size() % 2 == 1 ? samples[mid] : 0.5 * (samples[mid - 1] + samples[mid]);
}

}  // namespace

BenchReport run_bench(const BenchParams& params) {
  if (params.iterations < 5) throw Error(ErrorCode::invalid_argument, "bench: need at least 5 iterations");
  if (params.views.empty() || params.people.empty())
    throw Error(ErrorCode::invalid_argument, "bench: empty workload axis");
  params.config.validate();

  const PoseLayout layout = PoseLayout::cmu14();
  const VoxelGrid& grid = params.config.grid;
  const int max_views = *std::max_element(params.views.begin(), params.views.end());

  UnprojectOptions unproj_options = params.config.unprojection;
  unproj_options.threads = params.threads;

  BenchReport report;
  report.iterations = params.iterations;
  report.threads = params.threads;
  report.seed = params.seed;

  for (int people : params.people) {
    SceneSpec spec;
    spec.n_people = people;
    spec.seed = params.seed;
    const std::vector<Skeleton> scene = generate_scene(spec);
    const std::vector<Camera> rig =
        generate_camera_rig(max_views, spec.bounds_min, spec.bounds_max, params.seed);
    const std::vector<FeatureMap2D> maps = render_ideal_views(
        scene, rig, 120, 68, params.config.stride, 2.0);

    // Fixed-size volumes shared by the detect and decode stages: their input
    // does not depend on how many cameras produced it.
    const Volume heatmaps = render_heatmaps(scene, grid, params.config.sigma_voxels, layout);
    const Volume vectormaps = render_vectormaps(scene, grid, layout, params.config.limb_radius_voxels);
    const std::vector<std::vector<Peak>> peaks = detect_peaks(heatmaps, params.config.decoder.peaks);

    // All workloads of this people count are sampled in interleaved rounds:
    // round i times every workload once before any workload gets round i+1.
    // Slow machine drift (frequency scaling, co-tenant load) then shifts all
    // view counts alike instead of skewing the ones measured later.
    std::vector<StageRun> runs;
    for (int views : params.views) {
      std::vector<ViewRef> view_refs;
      for (int i = 0; i < views; ++i) view_refs.push_back({&maps[static_cast<std::size_t>(i)],
                                                           &rig[static_cast<std::size_t>(i)]});

      runs.push_back({{"unproject", views, people, 0.0, 1},
                      [view_refs, &grid, &unproj_options] {
                        volatile float sink = unproject(view_refs, grid, unproj_options).data[0];
                        (void)sink;
                      },
                      {}});
      runs.push_back({{"detect", views, people, 0.0, 1},
                      [&heatmaps, &params] {
                        volatile std::size_t sink = detect_peaks(heatmaps, params.config.decoder.peaks).size();
                        (void)sink;
                      },
                      {}});
      runs.push_back({{"decode", views, people, 0.0, 1},
                      [&peaks, &vectormaps, &layout, &params] {
                        volatile std::size_t sink = assemble(peaks, vectormaps, layout, params.config.decoder).size();
                        (void)sink;
                      },
                      {}});
    }

    for (StageRun& run : runs) calibrate(run, params.iterations, params.target_sample_ms);
    for (int i = 0; i < params.iterations; ++i)
      for (StageRun& run : runs) run.samples.push_back(time_once(run.fn, run.entry.inner_reps));
    for (StageRun& run : runs) {
      run.entry.median_ms = median_of(std::move(run.samples));
      report.entries.push_back(run.entry);
    }
  }
  return report;
}

std::string bench_to_json(const BenchReport& report) {
  ordered_json doc;
  doc["iterations"] = report.iterations;
  doc["threads"] = report.threads;
  doc["seed"] = report.seed;
  ordered_json entries = ordered_json::array();
  for (const BenchEntry& e : report.entries) {
    ordered_json entry;
    entry["stage"] = e.stage;
    entry["views"] = e.views;
    entry["people"] = e.people;
    entry["median_ms"] = e.median_ms;
    entry["inner_reps"] = e.inner_reps;
    entries.push_back(std::move(entry));
  }
  doc["entries"] = std::move(entries);
  return doc.dump(2) + "\n";
}

double linear_fit_r2(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw Error(ErrorCode::invalid_argument, "linear_fit_r2: need two equally sized series");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw Error(ErrorCode::invalid_argument, "linear_fit_r2: degenerate x values");
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;

  const double mean_y = sy / n;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double fit = slope * xs[i] + intercept;
    ss_res += (ys[i] - fit) * (ys[i] - fit);
    ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
  }
  if (ss_tot == 0.0) return 1.0;  // constant series: any horizontal line fits perfectly
  return 1.0 - ss_res / ss_tot;
}

}  // namespace voxpaf

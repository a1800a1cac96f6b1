// Command-line front end for the voxpaf shared library. Talks to the
// library exclusively through its C interface.
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "voxpaf/capi.h"

namespace {

// Exit codes: 0 success, 1 usage error, 2 data/runtime error.
constexpr int kExitData = 2;

void check(vxp_status status, const char* what) {
  if (status == VXP_OK) return;
  std::fprintf(stderr, "error: %s: %s\n", what, vxp_last_error());
  std::exit(kExitData);
}

template <typename T, void (*Free)(T*)>
using handle = std::unique_ptr<T, std::integral_constant<void (*)(T*), Free>>;

using config_ptr = handle<vxp_config, vxp_config_free>;
using layout_ptr = handle<vxp_layout, vxp_layout_free>;
using rig_ptr = handle<vxp_rig, vxp_rig_free>;
using skeletons_ptr = handle<vxp_skeletons, vxp_skeletons_free>;
using views_ptr = handle<vxp_views, vxp_views_free>;
using volume_ptr = handle<vxp_volume, vxp_volume_free>;

struct string_ptr {
  char* s = nullptr;
  ~string_ptr() { vxp_string_free(s); }
};

config_ptr make_config(const std::string& path, bool seed_set, std::uint64_t seed, int threads) {
  vxp_config* raw = nullptr;
  if (path.empty())
    check(vxp_config_create_default(&raw), "default config");
  else
    check(vxp_config_load(path.c_str(), &raw), "load config");
  config_ptr config(raw);
  if (seed_set) check(vxp_config_set_seed(config.get(), seed), "set seed");
  if (threads >= 0) check(vxp_config_set_threads(config.get(), threads), "set threads");
  return config;
}

layout_ptr make_layout(const std::string& path) {
  vxp_layout* raw = nullptr;
  if (path.empty())
    check(vxp_layout_create_default(&raw), "default layout");
  else
    check(vxp_layout_load(path.c_str(), &raw), "load layout");
  return layout_ptr(raw);
}

void write_text(const std::string& path, const char* text) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f || std::fputs(text, f) < 0 || std::fclose(f) != 0) {
    std::fprintf(stderr, "error: cannot write %s\n", path.c_str());
    std::exit(kExitData);
  }
}

std::string view_path(const std::string& dir, int index) {
  char name[32];
  std::snprintf(name, sizeof name, "view_%02d.bin", index);
  return dir + "/" + name;
}

int cmd_synth(int people, int cams, std::uint64_t seed, const std::string& out_dir, int map_width, int map_height,
              double stride, double sigma2d) {
  vxp_skeletons* scene_raw = nullptr;
  check(vxp_scene_generate(people, seed, &scene_raw), "generate scene");
  skeletons_ptr scene(scene_raw);

  vxp_rig* rig_raw = nullptr;
  check(vxp_rig_generate(cams, seed, &rig_raw), "generate rig");
  rig_ptr rig(rig_raw);

  layout_ptr layout = make_layout("");
  check(vxp_skeletons_save(scene.get(), layout.get(), (out_dir + "/skeletons.json").c_str()), "save skeletons");
  check(vxp_rig_save(rig.get(), (out_dir + "/calibration.json").c_str()), "save calibration");

  vxp_views* views_raw = nullptr;
  check(vxp_views_render_ideal(scene.get(), rig.get(), map_width, map_height, stride, sigma2d, &views_raw),
        "render views");
  views_ptr views(views_raw);
  int n_views = 0;
  check(vxp_views_count(views.get(), &n_views), "count views");
  for (int i = 0; i < n_views; ++i)
    check(vxp_views_save_one(views.get(), i, view_path(out_dir, i).c_str()), "save view");

  std::printf("wrote %d people, %d views to %s\n", people, n_views, out_dir.c_str());
  return 0;
}

int cmd_run(const std::string& calib, const std::vector<std::string>& view_files, const std::vector<int>& view_indices,
            const std::string& config_path, bool seed_set, std::uint64_t seed, int threads,
            const std::string& layout_path, const std::string& gt_path, bool gt_volumes, const std::string& out_path,
            const std::string& dump_heatmaps, const std::string& dump_vectormaps) {
  config_ptr config = make_config(config_path, seed_set, seed, threads);
  layout_ptr layout = make_layout(layout_path);

  vxp_skeletons* gt_raw = nullptr;
  check(vxp_skeletons_load(gt_path.c_str(), layout.get(), &gt_raw), "load ground truth");
  skeletons_ptr gt(gt_raw);

  volume_ptr heatmaps;
  if (gt_volumes) {
    vxp_volume* raw = nullptr;
    check(vxp_render_heatmap_volume(gt.get(), layout.get(), config.get(), &raw), "render heatmaps");
    heatmaps.reset(raw);
  } else {
    vxp_rig* rig_raw = nullptr;
    check(vxp_rig_load(calib.c_str(), &rig_raw), "load calibration");
    rig_ptr rig(rig_raw);

    std::vector<const char*> paths;
    for (const std::string& p : view_files) paths.push_back(p.c_str());
    vxp_views* views_raw = nullptr;
    check(vxp_views_load(paths.data(), static_cast<int>(paths.size()), &views_raw), "load views");
    views_ptr views(views_raw);

    vxp_volume* raw = nullptr;
    check(vxp_unproject_views(views.get(), rig.get(), view_indices.empty() ? nullptr : view_indices.data(),
                              static_cast<int>(view_indices.size()), config.get(), &raw),
          "unproject");
    heatmaps.reset(raw);
  }

  // The vector field comes from the reference skeletons: it stands in for
  // the trained network output this tool does not include.
  vxp_volume* vm_raw = nullptr;
  check(vxp_render_vectormap_volume(gt.get(), layout.get(), config.get(), &vm_raw), "render vectormaps");
  volume_ptr vectormaps(vm_raw);

  if (!dump_heatmaps.empty()) check(vxp_volume_save(heatmaps.get(), dump_heatmaps.c_str()), "dump heatmaps");
  if (!dump_vectormaps.empty())
    check(vxp_volume_save(vectormaps.get(), dump_vectormaps.c_str()), "dump vectormaps");

  vxp_skeletons* pred_raw = nullptr;
  check(vxp_decode_volumes(heatmaps.get(), vectormaps.get(), layout.get(), config.get(), &pred_raw), "decode");
  skeletons_ptr pred(pred_raw);
  check(vxp_skeletons_save(pred.get(), layout.get(), out_path.c_str()), "save predictions");

  int n_pred = 0;
  check(vxp_skeletons_count(pred.get(), &n_pred), "count predictions");
  std::printf("decoded %d skeletons -> %s\n", n_pred, out_path.c_str());
  return 0;
}

int cmd_eval(const std::string& gt_path, const std::string& pred_path, const std::string& layout_path,
             const std::string& json_path) {
  layout_ptr layout = make_layout(layout_path);
  vxp_skeletons* gt_raw = nullptr;
  check(vxp_skeletons_load(gt_path.c_str(), layout.get(), &gt_raw), "load ground truth");
  skeletons_ptr gt(gt_raw);
  vxp_skeletons* pred_raw = nullptr;
  check(vxp_skeletons_load(pred_path.c_str(), layout.get(), &pred_raw), "load predictions");
  skeletons_ptr pred(pred_raw);

  string_ptr table;
  check(vxp_evaluate_table(gt.get(), pred.get(), layout.get(), &table.s), "evaluate");
  std::fputs(table.s, stdout);

  if (!json_path.empty()) {
    string_ptr json;
    check(vxp_evaluate_json(gt.get(), pred.get(), layout.get(), &json.s), "evaluate");
    write_text(json_path, json.s);
  }
  return 0;
}

int cmd_bench(const std::vector<int>& views, const std::vector<int>& people, int iterations, int threads,
              std::uint64_t seed, const std::string& out_path) {
  string_ptr json;
  check(vxp_bench_run(views.data(), static_cast<int>(views.size()), people.data(),
                      static_cast<int>(people.size()), iterations, threads, seed, &json.s),
        "bench");
  if (out_path.empty())
    std::fputs(json.s, stdout);
  else
    write_text(out_path, json.s);
  return 0;
}

int cmd_render_gt(const std::string& skeletons_path, const std::string& layout_path, const std::string& config_path,
                  const std::string& heatmaps_path, const std::string& vectormaps_path) {
  config_ptr config = make_config(config_path, false, 0, -1);
  layout_ptr layout = make_layout(layout_path);
  vxp_skeletons* raw = nullptr;
  check(vxp_skeletons_load(skeletons_path.c_str(), layout.get(), &raw), "load skeletons");
  skeletons_ptr skeletons(raw);

  if (!heatmaps_path.empty()) {
    vxp_volume* hm = nullptr;
    check(vxp_render_heatmap_volume(skeletons.get(), layout.get(), config.get(), &hm), "render heatmaps");
    volume_ptr holder(hm);
    check(vxp_volume_save(hm, heatmaps_path.c_str()), "save heatmaps");
  }
  if (!vectormaps_path.empty()) {
    vxp_volume* vm = nullptr;
    check(vxp_render_vectormap_volume(skeletons.get(), layout.get(), config.get(), &vm), "render vectormaps");
    volume_ptr holder(vm);
    check(vxp_volume_save(vm, vectormaps_path.c_str()), "save vectormaps");
  }
  return 0;
}

int cmd_detect(const std::string& volume_path, const std::string& config_path, const std::string& out_path) {
  config_ptr config = make_config(config_path, false, 0, -1);
  vxp_volume* raw = nullptr;
  check(vxp_volume_load(volume_path.c_str(), &raw), "load volume");
  volume_ptr volume(raw);

  string_ptr json;
  check(vxp_detect_peaks_json(volume.get(), config.get(), &json.s), "detect");
  if (out_path.empty())
    std::fputs(json.s, stdout);
  else
    write_text(out_path, json.s);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-view volumetric multi-person pose pipeline"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic scene: skeletons, camera rig, per-view maps");
  int people = 3, cams = 4, map_width = 120, map_height = 68;
  std::uint64_t synth_seed = 0;
  double stride = 16.0, sigma2d = 2.0;
  std::string out_dir;
  synth->add_option("--people", people, "Number of people")->check(CLI::NonNegativeNumber);
  synth->add_option("--cams", cams, "Number of cameras")->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_seed, "Random seed");
  synth->add_option("--out", out_dir, "Output directory (must exist)")->required();
  synth->add_option("--map-width", map_width, "Feature map width")->check(CLI::PositiveNumber);
  synth->add_option("--map-height", map_height, "Feature map height")->check(CLI::PositiveNumber);
  synth->add_option("--stride", stride, "Image pixels per feature-map texel");
  synth->add_option("--sigma2d", sigma2d, "2D Gaussian width in feature-map pixels");

  // run
  auto* run = app.add_subcommand("run", "Unproject views, detect peaks, assemble skeletons");
  std::string run_calib, run_config, run_layout, run_gt, run_out, dump_hm, dump_vm;
  std::vector<std::string> run_views;
  std::vector<int> run_view_indices;
  std::uint64_t run_seed = 0;
  int run_threads = -1;
  bool gt_volumes = false;
  run->add_option("--calib", run_calib, "Camera calibration JSON");
  run->add_option("--view", run_views, "Per-view feature map dump (repeatable, ordered like the calibration)");
  run->add_option("--views", run_view_indices,
                  "Camera index for each --view file, comma-separated (default: 0,1,... matching the calibration)")
      ->delimiter(',');
  run->add_option("--config", run_config, "Pipeline config JSON");
  bool run_seed_set = false;
  run->add_option("--seed", run_seed, "Override the config seed")->each([&](const std::string&) {
    run_seed_set = true;
  });
  run->add_option("--threads", run_threads, "Worker threads (0 = hardware)");
  run->add_option("--layout", run_layout, "Pose layout JSON (default: built-in 14-joint layout)");
  run->add_option("--gt", run_gt, "Reference skeletons JSON (source of the vector field)")->required();
  run->add_flag("--gt-volumes", gt_volumes, "Render the joint heatmaps from --gt too, bypassing unprojection");
  run->add_option("--out", run_out, "Predictions JSON path")->required();
  run->add_option("--dump-heatmaps", dump_hm, "Write the heatmap volume here");
  run->add_option("--dump-vectormaps", dump_vm, "Write the vectormap volume here");

  // eval
  auto* eval = app.add_subcommand("eval", "Compare predictions against ground truth");
  std::string eval_gt, eval_pred, eval_layout, eval_json;
  eval->add_option("--gt", eval_gt, "Ground-truth skeletons JSON")->required();
  eval->add_option("--pred", eval_pred, "Predicted skeletons JSON")->required();
  eval->add_option("--layout", eval_layout, "Pose layout JSON");
  eval->add_option("--json", eval_json, "Also write the report as JSON here");

  // bench
  auto* bench = app.add_subcommand("bench", "Time the pipeline stages over synthetic workloads");
  std::vector<int> bench_views = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<int> bench_people = {1, 2, 5, 10};
  int bench_iterations = 7, bench_threads = 1;
  std::uint64_t bench_seed = 0;
  std::string bench_out;
  bench->add_option("--views", bench_views, "View counts to sweep")->delimiter(',');
  bench->add_option("--people", bench_people, "People counts to sweep")->delimiter(',');
  bench->add_option("--iterations", bench_iterations, "Timing samples per entry (>= 5)");
  bench->add_option("--threads", bench_threads, "Worker threads during timing");
  bench->add_option("--seed", bench_seed, "Workload seed");
  bench->add_option("--out", bench_out, "Report JSON path (default: stdout)");

  // render-gt
  auto* render = app.add_subcommand("render-gt", "Render target volumes from skeletons");
  std::string rg_skeletons, rg_layout, rg_config, rg_hm, rg_vm;
  render->add_option("--skeletons", rg_skeletons, "Skeletons JSON")->required();
  render->add_option("--layout", rg_layout, "Pose layout JSON");
  render->add_option("--config", rg_config, "Pipeline config JSON");
  render->add_option("--heatmaps", rg_hm, "Heatmap volume output path");
  render->add_option("--vectormaps", rg_vm, "Vectormap volume output path");

  // detect
  auto* detect = app.add_subcommand("detect", "List heatmap peaks of a volume dump");
  std::string det_volume, det_config, det_out;
  detect->add_option("--volume", det_volume, "Heatmap volume dump")->required();
  detect->add_option("--config", det_config, "Pipeline config JSON");
  detect->add_option("--out", det_out, "Peaks JSON path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // usage error
  }

  if (synth->parsed()) return cmd_synth(people, cams, synth_seed, out_dir, map_width, map_height, stride, sigma2d);
  if (run->parsed()) {
    if (!gt_volumes && (run_calib.empty() || run_views.empty())) {
      std::fprintf(stderr, "error: run needs --calib and at least one --view unless --gt-volumes is given\n");
      return 1;
    }
    return cmd_run(run_calib, run_views, run_view_indices, run_config, run_seed_set, run_seed, run_threads,
                   run_layout, run_gt, gt_volumes, run_out, dump_hm, dump_vm);
  }
  if (eval->parsed()) return cmd_eval(eval_gt, eval_pred, eval_layout, eval_json);
  if (bench->parsed()) return cmd_bench(bench_views, bench_people, bench_iterations, bench_threads, bench_seed,
                                        bench_out);
  if (render->parsed()) {
    if (rg_hm.empty() && rg_vm.empty()) {
      std::fprintf(stderr, "error: render-gt needs --heatmaps and/or --vectormaps\n");
      return 1;
    }
    return cmd_render_gt(rg_skeletons, rg_layout, rg_config, rg_hm, rg_vm);
  }
  if (detect->parsed()) return cmd_detect(det_volume, det_config, det_out);
  return 1;
}

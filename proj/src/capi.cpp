#include "voxpaf/capi.h"

#include <cstring>
#include <exception>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "voxpaf/bench.hpp"
#include "voxpaf/config.hpp"
#include "voxpaf/decoder.hpp"
#include "voxpaf/eval.hpp"
#include "voxpaf/synth.hpp"

namespace {

thread_local std::string g_last_error = "no error";

vxp_status status_from(const voxpaf::Error& e) {
  switch (e.code()) {
    case voxpaf::ErrorCode::invalid_argument: return VXP_ERROR_INVALID_ARGUMENT;
    case voxpaf::ErrorCode::io: return VXP_ERROR_IO;
    case voxpaf::ErrorCode::parse: return VXP_ERROR_PARSE;
    case voxpaf::ErrorCode::constraint: return VXP_ERROR_CONSTRAINT;
  }
  return VXP_ERROR_UNKNOWN;
}

// Runs `fn`, translating exceptions into status codes + the thread-local
// error message.
template <typename Fn>
vxp_status guarded(Fn&& fn) {
  try {
    fn();
    return VXP_OK;
  } catch (const voxpaf::Error& e) {
    g_last_error = e.what();
    return status_from(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return VXP_ERROR_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown error";
    return VXP_ERROR_UNKNOWN;
  }
}

vxp_status fail_null_argument(const char* what) {
  g_last_error = std::string(what) + ": null argument";
  return VXP_ERROR_INVALID_ARGUMENT;
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

struct vxp_config {
  voxpaf::PipelineConfig value;
};

struct vxp_layout {
  voxpaf::PoseLayout value;
};

struct vxp_rig {
  std::vector<voxpaf::Camera> value;
};

struct vxp_skeletons {
  std::vector<voxpaf::Skeleton> value;
};

struct vxp_views {
  std::vector<voxpaf::FeatureMap2D> value;
};

struct vxp_volume {
  voxpaf::Volume value;
};

extern "C" {

const char* vxp_last_error(void) { return g_last_error.c_str(); }

void vxp_string_free(char* s) { delete[] s; }

/* ---- configuration ------------------------------------------------------ */

vxp_status vxp_config_create_default(vxp_config** out) {
  if (!out) return fail_null_argument("vxp_config_create_default");
  return guarded([&] { *out = new vxp_config{voxpaf::PipelineConfig{}}; });
}

vxp_status vxp_config_load(const char* path, vxp_config** out) {
  if (!path || !out) return fail_null_argument("vxp_config_load");
  return guarded([&] { *out = new vxp_config{voxpaf::load_config(path)}; });
}

vxp_status vxp_config_save(const vxp_config* config, const char* path) {
  if (!config || !path) return fail_null_argument("vxp_config_save");
  return guarded([&] { voxpaf::save_config(config->value, path); });
}

vxp_status vxp_config_set_seed(vxp_config* config, uint64_t seed) {
  if (!config) return fail_null_argument("vxp_config_set_seed");
  config->value.seed = seed;
  return VXP_OK;
}

vxp_status vxp_config_set_threads(vxp_config* config, int threads) {
  if (!config) return fail_null_argument("vxp_config_set_threads");
  if (threads < 0) {
    g_last_error = "vxp_config_set_threads: threads must be >= 0";
    return VXP_ERROR_INVALID_ARGUMENT;
  }
  config->value.unprojection.threads = threads;
  return VXP_OK;
}

void vxp_config_free(vxp_config* config) { delete config; }

/* ---- layout ------------------------------------------------------------- */

vxp_status vxp_layout_create_default(vxp_layout** out) {
  if (!out) return fail_null_argument("vxp_layout_create_default");
  return guarded([&] { *out = new vxp_layout{voxpaf::PoseLayout::cmu14()}; });
}

vxp_status vxp_layout_load(const char* path, vxp_layout** out) {
  if (!path || !out) return fail_null_argument("vxp_layout_load");
  return guarded([&] { *out = new vxp_layout{voxpaf::load_layout(path)}; });
}

vxp_status vxp_layout_save(const vxp_layout* layout, const char* path) {
  if (!layout || !path) return fail_null_argument("vxp_layout_save");
  return guarded([&] { voxpaf::save_layout(layout->value, path); });
}

void vxp_layout_free(vxp_layout* layout) { delete layout; }

/* ---- camera rigs -------------------------------------------------------- */

vxp_status vxp_rig_generate(int n_cams, uint64_t seed, vxp_rig** out) {
  if (!out) return fail_null_argument("vxp_rig_generate");
  return guarded([&] {
    const voxpaf::SceneSpec defaults;
    *out = new vxp_rig{voxpaf::generate_camera_rig(n_cams, defaults.bounds_min, defaults.bounds_max, seed)};
  });
}

vxp_status vxp_rig_load(const char* path, vxp_rig** out) {
  if (!path || !out) return fail_null_argument("vxp_rig_load");
  return guarded([&] { *out = new vxp_rig{voxpaf::load_calibration(path)}; });
}

vxp_status vxp_rig_save(const vxp_rig* rig, const char* path) {
  if (!rig || !path) return fail_null_argument("vxp_rig_save");
  return guarded([&] { voxpaf::save_calibration(rig->value, path); });
}

vxp_status vxp_rig_count(const vxp_rig* rig, int* out) {
  if (!rig || !out) return fail_null_argument("vxp_rig_count");
  *out = static_cast<int>(rig->value.size());
  return VXP_OK;
}

void vxp_rig_free(vxp_rig* rig) { delete rig; }

/* ---- skeleton sets ------------------------------------------------------ */

vxp_status vxp_scene_generate(int n_people, uint64_t seed, vxp_skeletons** out) {
  if (!out) return fail_null_argument("vxp_scene_generate");
  return guarded([&] {
    voxpaf::SceneSpec spec;
    spec.n_people = n_people;
    spec.seed = seed;
    *out = new vxp_skeletons{voxpaf::generate_scene(spec)};
  });
}

vxp_status vxp_skeletons_load(const char* path, const vxp_layout* layout, vxp_skeletons** out) {
  if (!path || !layout || !out) return fail_null_argument("vxp_skeletons_load");
  return guarded([&] { *out = new vxp_skeletons{voxpaf::load_skeletons(path, layout->value)}; });
}

vxp_status vxp_skeletons_save(const vxp_skeletons* skeletons, const vxp_layout* layout, const char* path) {
  if (!skeletons || !layout || !path) return fail_null_argument("vxp_skeletons_save");
  return guarded([&] { voxpaf::save_skeletons(skeletons->value, layout->value, path); });
}

vxp_status vxp_skeletons_count(const vxp_skeletons* skeletons, int* out) {
  if (!skeletons || !out) return fail_null_argument("vxp_skeletons_count");
  *out = static_cast<int>(skeletons->value.size());
  return VXP_OK;
}

void vxp_skeletons_free(vxp_skeletons* skeletons) { delete skeletons; }

/* ---- per-view feature maps ---------------------------------------------- */

vxp_status vxp_views_render_ideal(const vxp_skeletons* skeletons, const vxp_rig* rig, int map_width, int map_height,
                                  double stride, double sigma2d, vxp_views** out) {
  if (!skeletons || !rig || !out) return fail_null_argument("vxp_views_render_ideal");
  return guarded([&] {
    *out = new vxp_views{
        voxpaf::render_ideal_views(skeletons->value, rig->value, map_width, map_height, stride, sigma2d)};
  });
}

vxp_status vxp_views_load(const char* const* paths, int n, vxp_views** out) {
  if (!paths || !out) return fail_null_argument("vxp_views_load");
  if (n < 1) {
    g_last_error = "vxp_views_load: need at least one path";
    return VXP_ERROR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    auto views = std::make_unique<vxp_views>();
    for (int i = 0; i < n; ++i) {
      if (!paths[i]) throw voxpaf::Error(voxpaf::ErrorCode::invalid_argument, "vxp_views_load: null path");
      views->value.push_back(voxpaf::load_feature_map(paths[i]));
    }
    *out = views.release();
  });
}

vxp_status vxp_views_save_one(const vxp_views* views, int index, const char* path) {
  if (!views || !path) return fail_null_argument("vxp_views_save_one");
  if (index < 0 || index >= static_cast<int>(views->value.size())) {
    g_last_error = "vxp_views_save_one: index out of range";
    return VXP_ERROR_INVALID_ARGUMENT;
  }
  return guarded([&] { voxpaf::save_feature_map(views->value[static_cast<std::size_t>(index)], path); });
}

vxp_status vxp_views_count(const vxp_views* views, int* out) {
  if (!views || !out) return fail_null_argument("vxp_views_count");
  *out = static_cast<int>(views->value.size());
  return VXP_OK;
}

void vxp_views_free(vxp_views* views) { delete views; }

/* ---- voxel volumes ------------------------------------------------------ */

vxp_status vxp_volume_load(const char* path, vxp_volume** out) {
  if (!path || !out) return fail_null_argument("vxp_volume_load");
  return guarded([&] { *out = new vxp_volume{voxpaf::load_volume(path)}; });
}

vxp_status vxp_volume_save(const vxp_volume* volume, const char* path) {
  if (!volume || !path) return fail_null_argument("vxp_volume_save");
  return guarded([&] { voxpaf::save_volume(volume->value, path); });
}

void vxp_volume_free(vxp_volume* volume) { delete volume; }

/* ---- pipeline stages ---------------------------------------------------- */

vxp_status vxp_unproject_views(const vxp_views* views, const vxp_rig* rig, const int* indices, int n_indices,
                               const vxp_config* config, vxp_volume** out) {
  if (!views || !rig || !config || !out) return fail_null_argument("vxp_unproject_views");
  return guarded([&] {
    const int n_views = static_cast<int>(views->value.size());
    const int n_cams = static_cast<int>(rig->value.size());
    std::vector<int> cam_of(static_cast<std::size_t>(n_views));
    if (indices && n_indices > 0) {
      if (n_indices != n_views)
        throw voxpaf::Error(voxpaf::ErrorCode::invalid_argument,
                            "vxp_unproject_views: need one camera index per view");
      cam_of.assign(indices, indices + n_indices);
    } else {
      if (n_views != n_cams)
        throw voxpaf::Error(voxpaf::ErrorCode::invalid_argument,
                            "vxp_unproject_views: view and camera counts differ");
      for (int i = 0; i < n_views; ++i) cam_of[static_cast<std::size_t>(i)] = i;
    }
    std::vector<voxpaf::ViewRef> refs;
    for (int i = 0; i < n_views; ++i) {
      const int c = cam_of[static_cast<std::size_t>(i)];
      if (c < 0 || c >= n_cams)
        throw voxpaf::Error(voxpaf::ErrorCode::invalid_argument, "vxp_unproject_views: camera index out of range");
      refs.push_back({&views->value[static_cast<std::size_t>(i)], &rig->value[static_cast<std::size_t>(c)]});
    }
    *out = new vxp_volume{voxpaf::unproject(refs, config->value.grid, config->value.unprojection)};
  });
}

vxp_status vxp_render_heatmap_volume(const vxp_skeletons* skeletons, const vxp_layout* layout,
                                     const vxp_config* config, vxp_volume** out) {
  if (!skeletons || !layout || !config || !out) return fail_null_argument("vxp_render_heatmap_volume");
  return guarded([&] {
    *out = new vxp_volume{voxpaf::render_heatmaps(skeletons->value, config->value.grid,
                                                  config->value.sigma_voxels, layout->value)};
  });
}

vxp_status vxp_render_vectormap_volume(const vxp_skeletons* skeletons, const vxp_layout* layout,
                                       const vxp_config* config, vxp_volume** out) {
  if (!skeletons || !layout || !config || !out) return fail_null_argument("vxp_render_vectormap_volume");
  return guarded([&] {
    *out = new vxp_volume{voxpaf::render_vectormaps(skeletons->value, config->value.grid, layout->value,
                                                    config->value.limb_radius_voxels)};
  });
}

vxp_status vxp_decode_volumes(const vxp_volume* heatmaps, const vxp_volume* vectormaps, const vxp_layout* layout,
                              const vxp_config* config, vxp_skeletons** out) {
  if (!heatmaps || !vectormaps || !layout || !config || !out) return fail_null_argument("vxp_decode_volumes");
  return guarded([&] {
    *out = new vxp_skeletons{
        voxpaf::decode(heatmaps->value, vectormaps->value, layout->value, config->value.decoder)};
  });
}

vxp_status vxp_detect_peaks_json(const vxp_volume* heatmaps, const vxp_config* config, char** json_out) {
  if (!heatmaps || !config || !json_out) return fail_null_argument("vxp_detect_peaks_json");
  return guarded([&] {
    const auto per_channel = voxpaf::detect_peaks(heatmaps->value, config->value.decoder.peaks);
    nlohmann::ordered_json doc;
    doc["channels"] = nlohmann::ordered_json::array();
    for (const auto& peaks : per_channel) {
      nlohmann::ordered_json channel = nlohmann::ordered_json::array();
      for (const voxpaf::Peak& p : peaks) {
        const voxpaf::Vec3 world = voxpaf::grid_to_world(heatmaps->value.grid, p.position);
        nlohmann::ordered_json entry;
        entry["grid"] = {p.position.x, p.position.y, p.position.z};
        entry["world"] = {world.x, world.y, world.z};
        entry["score"] = p.score;
        channel.push_back(std::move(entry));
      }
      doc["channels"].push_back(std::move(channel));
    }
    *json_out = copy_string(doc.dump(2) + "\n");
  });
}

vxp_status vxp_evaluate_json(const vxp_skeletons* gt, const vxp_skeletons* pred, const vxp_layout* layout,
                             char** json_out) {
  if (!gt || !pred || !layout || !json_out) return fail_null_argument("vxp_evaluate_json");
  return guarded([&] {
    const voxpaf::EvalReport report = voxpaf::evaluate(gt->value, pred->value, layout->value);
    *json_out = copy_string(voxpaf::report_to_json(report));
  });
}

vxp_status vxp_evaluate_table(const vxp_skeletons* gt, const vxp_skeletons* pred, const vxp_layout* layout,
                              char** text_out) {
  if (!gt || !pred || !layout || !text_out) return fail_null_argument("vxp_evaluate_table");
  return guarded([&] {
    const voxpaf::EvalReport report = voxpaf::evaluate(gt->value, pred->value, layout->value);
    *text_out = copy_string(voxpaf::report_to_table(report));
  });
}

vxp_status vxp_bench_run(const int* views, int n_views, const int* people, int n_people, int iterations, int threads,
                         uint64_t seed, char** json_out) {
  if (!json_out) return fail_null_argument("vxp_bench_run");
  return guarded([&] {
    voxpaf::BenchParams params;
    if (views && n_views > 0) params.views.assign(views, views + n_views);
    if (people && n_people > 0) params.people.assign(people, people + n_people);
    params.iterations = iterations;
    params.threads = threads;
    params.seed = seed;
    params.config.seed = seed;
    const voxpaf::BenchReport report = voxpaf::run_bench(params);
    *json_out = copy_string(voxpaf::bench_to_json(report));
  });
}

} /* extern "C" */

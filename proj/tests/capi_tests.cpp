// Exercises the shared library exactly as an external consumer would: only
// the C header, no internal C++ types.
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "voxpaf/capi.h"

namespace {

using nlohmann::json;

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << content;
}

// RAII so failed REQUIREs cannot leak handles across tests.
template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  ~Handle() { reset(); }
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  void reset() {
    if (ptr) Free(ptr);
    ptr = nullptr;
  }
  T** out() {
    reset();
    return &ptr;
  }
  operator T*() const { return ptr; }
};

using ConfigHandle = Handle<vxp_config, vxp_config_free>;
using LayoutHandle = Handle<vxp_layout, vxp_layout_free>;
using RigHandle = Handle<vxp_rig, vxp_rig_free>;
using SkeletonsHandle = Handle<vxp_skeletons, vxp_skeletons_free>;
using ViewsHandle = Handle<vxp_views, vxp_views_free>;
using VolumeHandle = Handle<vxp_volume, vxp_volume_free>;

struct OwnedString {
  char* ptr = nullptr;
  ~OwnedString() { vxp_string_free(ptr); }
  std::string str() const { return ptr ? std::string(ptr) : std::string(); }
};

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path(temp_path(name)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("configuration handles save, load and mutate") {
  ConfigHandle config;
  REQUIRE(vxp_config_create_default(config.out()) == VXP_OK);
  REQUIRE(vxp_config_set_seed(config, 99) == VXP_OK);
  REQUIRE(vxp_config_set_threads(config, 2) == VXP_OK);
  CHECK(vxp_config_set_threads(config, -1) == VXP_ERROR_INVALID_ARGUMENT);

  TempFile a("vxp_capi_config_a.json");
  TempFile b("vxp_capi_config_b.json");
  REQUIRE(vxp_config_save(config, a.path.c_str()) == VXP_OK);
  const std::string text = read_file(a.path);
  CHECK(text.find("\"seed\": 99") != std::string::npos);
  CHECK(text.find("\"threads\": 2") != std::string::npos);

  ConfigHandle loaded;
  REQUIRE(vxp_config_load(a.path.c_str(), loaded.out()) == VXP_OK);
  REQUIRE(vxp_config_save(loaded, b.path.c_str()) == VXP_OK);
  CHECK(read_file(b.path) == text);

  ConfigHandle missing;
  CHECK(vxp_config_load("/nonexistent/vxp.json", missing.out()) == VXP_ERROR_IO);
  CHECK(std::string(vxp_last_error()).size() > 0);

  TempFile broken("vxp_capi_config_broken.json");
  write_file(broken.path, "{ definitely not json");
  CHECK(vxp_config_load(broken.path.c_str(), missing.out()) == VXP_ERROR_PARSE);
}

TEST_CASE("layout handles expose the default tree and survive files") {
  LayoutHandle layout;
  REQUIRE(vxp_layout_create_default(layout.out()) == VXP_OK);

  TempFile a("vxp_capi_layout_a.json");
  TempFile b("vxp_capi_layout_b.json");
  REQUIRE(vxp_layout_save(layout, a.path.c_str()) == VXP_OK);
  const json doc = json::parse(read_file(a.path));
  CHECK(doc.at("joints").size() == 14);
  CHECK(doc.at("pafs").size() == 13);

  LayoutHandle loaded;
  REQUIRE(vxp_layout_load(a.path.c_str(), loaded.out()) == VXP_OK);
  REQUIRE(vxp_layout_save(loaded, b.path.c_str()) == VXP_OK);
  CHECK(read_file(b.path) == read_file(a.path));

  TempFile bad("vxp_capi_layout_bad.json");
  write_file(bad.path, "{\"joints\": [\"neck\"], \"pafs\": [[0, 0]]}");
  LayoutHandle rejected;
  const vxp_status st = vxp_layout_load(bad.path.c_str(), rejected.out());
  CHECK(st != VXP_OK);
}

TEST_CASE("rig handles generate, count and round-trip") {
  RigHandle rig;
  REQUIRE(vxp_rig_generate(4, 2024, rig.out()) == VXP_OK);
  int count = 0;
  REQUIRE(vxp_rig_count(rig, &count) == VXP_OK);
  CHECK(count == 4);

  TempFile a("vxp_capi_rig_a.json");
  TempFile b("vxp_capi_rig_b.json");
  REQUIRE(vxp_rig_save(rig, a.path.c_str()) == VXP_OK);
  RigHandle loaded;
  REQUIRE(vxp_rig_load(a.path.c_str(), loaded.out()) == VXP_OK);
  REQUIRE(vxp_rig_save(loaded, b.path.c_str()) == VXP_OK);
  CHECK(read_file(b.path) == read_file(a.path));

  RigHandle none;
  CHECK(vxp_rig_generate(0, 0, none.out()) == VXP_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("skeleton handles generate, count and round-trip") {
  SkeletonsHandle scene;
  REQUIRE(vxp_scene_generate(3, 1, scene.out()) == VXP_OK);
  int count = 0;
  REQUIRE(vxp_skeletons_count(scene, &count) == VXP_OK);
  CHECK(count == 3);

  LayoutHandle layout;
  REQUIRE(vxp_layout_create_default(layout.out()) == VXP_OK);
  TempFile a("vxp_capi_skel_a.json");
  TempFile b("vxp_capi_skel_b.json");
  REQUIRE(vxp_skeletons_save(scene, layout, a.path.c_str()) == VXP_OK);
  SkeletonsHandle loaded;
  REQUIRE(vxp_skeletons_load(a.path.c_str(), layout, loaded.out()) == VXP_OK);
  REQUIRE(vxp_skeletons_save(loaded, layout, b.path.c_str()) == VXP_OK);
  CHECK(read_file(b.path) == read_file(a.path));

  SkeletonsHandle invalid;
  CHECK(vxp_scene_generate(-1, 0, invalid.out()) == VXP_ERROR_INVALID_ARGUMENT);
  CHECK(vxp_scene_generate(200, 0, invalid.out()) == VXP_ERROR_CONSTRAINT);  // cannot be separated
}

TEST_CASE("the full C pipeline runs from scene to evaluation") {
  ConfigHandle config;
  REQUIRE(vxp_config_create_default(config.out()) == VXP_OK);
  LayoutHandle layout;
  REQUIRE(vxp_layout_create_default(layout.out()) == VXP_OK);

  SkeletonsHandle scene;
  REQUIRE(vxp_scene_generate(2, 7, scene.out()) == VXP_OK);
  RigHandle rig;
  REQUIRE(vxp_rig_generate(4, 7, rig.out()) == VXP_OK);

  ViewsHandle views;
  REQUIRE(vxp_views_render_ideal(scene, rig, 120, 68, 16.0, 2.0, views.out()) == VXP_OK);
  int view_count = 0;
  REQUIRE(vxp_views_count(views, &view_count) == VXP_OK);
  CHECK(view_count == 4);

  VolumeHandle heatmaps;
  REQUIRE(vxp_unproject_views(views, rig, nullptr, 0, config, heatmaps.out()) == VXP_OK);
  VolumeHandle vectormaps;
  REQUIRE(vxp_render_vectormap_volume(scene, layout, config, vectormaps.out()) == VXP_OK);

  SkeletonsHandle decoded;
  REQUIRE(vxp_decode_volumes(heatmaps, vectormaps, layout, config, decoded.out()) == VXP_OK);
  int decoded_count = 0;
  REQUIRE(vxp_skeletons_count(decoded, &decoded_count) == VXP_OK);
  CHECK(decoded_count == 2);

  OwnedString report;
  REQUIRE(vxp_evaluate_json(scene, decoded, layout, &report.ptr) == VXP_OK);
  const json doc = json::parse(report.str());
  CHECK(doc.at("counts").at("matched_pairs").get<int>() == 2);
  CHECK(doc.at("counts").at("unmatched_predictions").get<int>() == 0);
  REQUIRE(!doc.at("mpjpe_cm").is_null());
  CHECK(doc.at("mpjpe_cm").get<double>() < 10.0);
  CHECK(doc.at("pcp").at("groups").size() == 6);

  OwnedString table;
  REQUIRE(vxp_evaluate_table(scene, decoded, layout, &table.ptr) == VXP_OK);
  CHECK(table.str().find("MPJPE (cm)") != std::string::npos);
  CHECK(table.str().find("PCP average") != std::string::npos);

  OwnedString peaks;
  REQUIRE(vxp_detect_peaks_json(heatmaps, config, &peaks.ptr) == VXP_OK);
  const json peaks_doc = json::parse(peaks.str());
  REQUIRE(peaks_doc.at("channels").size() == 14);
  for (const auto& channel : peaks_doc.at("channels")) {
    CHECK(channel.size() >= 1);
    for (const auto& entry : channel) {
      CHECK(entry.at("grid").size() == 3);
      CHECK(entry.at("world").size() == 3);
      CHECK(entry.at("score").get<double>() > 0.0);
    }
  }
}

TEST_CASE("view handles save, reload and drive subset unprojection") {
  ConfigHandle config;
  REQUIRE(vxp_config_create_default(config.out()) == VXP_OK);
  SkeletonsHandle scene;
  REQUIRE(vxp_scene_generate(1, 5, scene.out()) == VXP_OK);
  RigHandle rig;
  REQUIRE(vxp_rig_generate(4, 5, rig.out()) == VXP_OK);
  ViewsHandle views;
  REQUIRE(vxp_views_render_ideal(scene, rig, 120, 68, 16.0, 2.0, views.out()) == VXP_OK);

  TempFile v2("vxp_capi_view2.bin");
  REQUIRE(vxp_views_save_one(views, 2, v2.path.c_str()) == VXP_OK);
  CHECK(vxp_views_save_one(views, 9, v2.path.c_str()) == VXP_ERROR_INVALID_ARGUMENT);

  const char* paths[1] = {v2.path.c_str()};
  ViewsHandle single;
  REQUIRE(vxp_views_load(paths, 1, single.out()) == VXP_OK);
  int count = 0;
  REQUIRE(vxp_views_count(single, &count) == VXP_OK);
  CHECK(count == 1);

  // One view cannot stand in for the whole rig without an explicit pairing.
  VolumeHandle volume;
  CHECK(vxp_unproject_views(single, rig, nullptr, 0, config, volume.out()) == VXP_ERROR_INVALID_ARGUMENT);

  const int pair_with_cam2[1] = {2};
  REQUIRE(vxp_unproject_views(single, rig, pair_with_cam2, 1, config, volume.out()) == VXP_OK);

  const int out_of_range[1] = {7};
  VolumeHandle rejected;
  CHECK(vxp_unproject_views(single, rig, out_of_range, 1, config, rejected.out()) == VXP_ERROR_INVALID_ARGUMENT);
  const int too_many[2] = {0, 1};
  CHECK(vxp_unproject_views(single, rig, too_many, 2, config, rejected.out()) == VXP_ERROR_INVALID_ARGUMENT);

  const char* missing[1] = {"/nonexistent/view.bin"};
  ViewsHandle none;
  CHECK(vxp_views_load(missing, 1, none.out()) == VXP_ERROR_IO);
  CHECK(vxp_views_load(paths, 0, none.out()) == VXP_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("volume handles round-trip through the binary container") {
  ConfigHandle config;
  REQUIRE(vxp_config_create_default(config.out()) == VXP_OK);
  LayoutHandle layout;
  REQUIRE(vxp_layout_create_default(layout.out()) == VXP_OK);
  SkeletonsHandle scene;
  REQUIRE(vxp_scene_generate(2, 9, scene.out()) == VXP_OK);

  VolumeHandle heatmaps;
  REQUIRE(vxp_render_heatmap_volume(scene, layout, config, heatmaps.out()) == VXP_OK);

  TempFile a("vxp_capi_volume_a.bin");
  TempFile b("vxp_capi_volume_b.bin");
  REQUIRE(vxp_volume_save(heatmaps, a.path.c_str()) == VXP_OK);
  VolumeHandle loaded;
  REQUIRE(vxp_volume_load(a.path.c_str(), loaded.out()) == VXP_OK);
  REQUIRE(vxp_volume_save(loaded, b.path.c_str()) == VXP_OK);
  CHECK(read_file(b.path) == read_file(a.path));

  VolumeHandle missing;
  CHECK(vxp_volume_load("/nonexistent/vxp.bin", missing.out()) == VXP_ERROR_IO);
}

TEST_CASE("decoding rejects volumes from different grids") {
  ConfigHandle config;
  REQUIRE(vxp_config_create_default(config.out()) == VXP_OK);
  LayoutHandle layout;
  REQUIRE(vxp_layout_create_default(layout.out()) == VXP_OK);
  SkeletonsHandle scene;
  REQUIRE(vxp_scene_generate(1, 10, scene.out()) == VXP_OK);

  VolumeHandle heatmaps;
  REQUIRE(vxp_render_heatmap_volume(scene, layout, config, heatmaps.out()) == VXP_OK);

  // Second configuration with a different voxel size, made by editing the
  // saved JSON — the C surface has no direct grid setter.
  TempFile edited("vxp_capi_config_edited.json");
  {
    TempFile original("vxp_capi_config_orig.json");
    REQUIRE(vxp_config_save(config, original.path.c_str()) == VXP_OK);
    json doc = json::parse(read_file(original.path));
    doc["grid"]["voxel_size"] = 0.08;
    write_file(edited.path, doc.dump(2) + "\n");
  }
  ConfigHandle other;
  REQUIRE(vxp_config_load(edited.path.c_str(), other.out()) == VXP_OK);

  VolumeHandle vectormaps;
  REQUIRE(vxp_render_vectormap_volume(scene, layout, other, vectormaps.out()) == VXP_OK);

  SkeletonsHandle decoded;
  CHECK(vxp_decode_volumes(heatmaps, vectormaps, layout, config, decoded.out()) == VXP_ERROR_INVALID_ARGUMENT);
  CHECK(std::string(vxp_last_error()).find("grid") != std::string::npos);
}

TEST_CASE("null arguments are rejected with messages") {
  CHECK(vxp_config_create_default(nullptr) == VXP_ERROR_INVALID_ARGUMENT);
  CHECK(std::string(vxp_last_error()).size() > 0);
  ConfigHandle config;
  REQUIRE(vxp_config_create_default(config.out()) == VXP_OK);
  CHECK(vxp_config_save(nullptr, "x.json") == VXP_ERROR_INVALID_ARGUMENT);
  CHECK(vxp_config_save(config, nullptr) == VXP_ERROR_INVALID_ARGUMENT);
  CHECK(vxp_config_set_seed(nullptr, 1) == VXP_ERROR_INVALID_ARGUMENT);
  CHECK(vxp_layout_create_default(nullptr) == VXP_ERROR_INVALID_ARGUMENT);
  CHECK(vxp_rig_generate(2, 0, nullptr) == VXP_ERROR_INVALID_ARGUMENT);
  CHECK(vxp_rig_count(nullptr, nullptr) == VXP_ERROR_INVALID_ARGUMENT);
  CHECK(vxp_scene_generate(1, 0, nullptr) == VXP_ERROR_INVALID_ARGUMENT);
  CHECK(vxp_views_load(nullptr, 1, nullptr) == VXP_ERROR_INVALID_ARGUMENT);
  CHECK(vxp_volume_load(nullptr, nullptr) == VXP_ERROR_INVALID_ARGUMENT);
  CHECK(vxp_unproject_views(nullptr, nullptr, nullptr, 0, nullptr, nullptr) == VXP_ERROR_INVALID_ARGUMENT);
  CHECK(vxp_decode_volumes(nullptr, nullptr, nullptr, nullptr, nullptr) == VXP_ERROR_INVALID_ARGUMENT);
  CHECK(vxp_detect_peaks_json(nullptr, nullptr, nullptr) == VXP_ERROR_INVALID_ARGUMENT);
  CHECK(vxp_evaluate_json(nullptr, nullptr, nullptr, nullptr) == VXP_ERROR_INVALID_ARGUMENT);
  CHECK(vxp_bench_run(nullptr, 0, nullptr, 0, 5, 1, 0, nullptr) == VXP_ERROR_INVALID_ARGUMENT);

  // Freeing NULL is a no-op, mirroring free().
  vxp_config_free(nullptr);
  vxp_layout_free(nullptr);
  vxp_rig_free(nullptr);
  vxp_skeletons_free(nullptr);
  vxp_views_free(nullptr);
  vxp_volume_free(nullptr);
  vxp_string_free(nullptr);
}

TEST_CASE("the benchmark entry point returns a machine-readable report") {
  const int views[1] = {1};
  const int people[1] = {1};
  OwnedString report;
  REQUIRE(vxp_bench_run(views, 1, people, 1, 5, 1, 0, &report.ptr) == VXP_OK);
  const json doc = json::parse(report.str());
  CHECK(doc.at("iterations").get<int>() == 5);
  REQUIRE(doc.at("entries").size() == 3);
  for (const auto& entry : doc.at("entries")) {
    CHECK(entry.at("median_ms").get<double>() > 0.0);
    CHECK(entry.at("inner_reps").get<int>() >= 1);
  }

  OwnedString rejected;
  CHECK(vxp_bench_run(views, 1, people, 1, 3, 1, 0, &rejected.ptr) == VXP_ERROR_INVALID_ARGUMENT);
}

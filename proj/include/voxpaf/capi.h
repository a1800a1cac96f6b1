/* C interface to the voxpaf shared library.
 *
 * Every function returns a vxp_status; on failure vxp_last_error() holds a
 * human-readable message for the calling thread. Out-parameters are written
 * only on VXP_OK. Objects returned through handles must be released with
 * the matching *_free function; strings with vxp_string_free.
 */
#ifndef VOXPAF_CAPI_H
#define VOXPAF_CAPI_H

#include <stdint.h>

#if defined(_WIN32)
#define VXP_API __declspec(dllexport)
#else
#define VXP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vxp_status {
  VXP_OK = 0,
  VXP_ERROR_INVALID_ARGUMENT = 1,
  VXP_ERROR_IO = 2,
  VXP_ERROR_PARSE = 3,
  VXP_ERROR_CONSTRAINT = 4,
  VXP_ERROR_UNKNOWN = 5,
} vxp_status;

/* Message describing the most recent failure on this thread. Never NULL. */
VXP_API const char* vxp_last_error(void);

/* Releases strings returned through char** out-parameters. */
VXP_API void vxp_string_free(char* s);

/* ---- pipeline configuration ------------------------------------------- */

typedef struct vxp_config vxp_config;

VXP_API vxp_status vxp_config_create_default(vxp_config** out);
VXP_API vxp_status vxp_config_load(const char* path, vxp_config** out);
VXP_API vxp_status vxp_config_save(const vxp_config* config, const char* path);
VXP_API vxp_status vxp_config_set_seed(vxp_config* config, uint64_t seed);
VXP_API vxp_status vxp_config_set_threads(vxp_config* config, int threads);
VXP_API void vxp_config_free(vxp_config* config);

/* ---- pose layout -------------------------------------------------------- */

typedef struct vxp_layout vxp_layout;

/* The standard 14-joint layout with its 13-edge tree. */
VXP_API vxp_status vxp_layout_create_default(vxp_layout** out);
VXP_API vxp_status vxp_layout_load(const char* path, vxp_layout** out);
VXP_API vxp_status vxp_layout_save(const vxp_layout* layout, const char* path);
VXP_API void vxp_layout_free(vxp_layout* layout);

/* ---- camera rigs -------------------------------------------------------- */

typedef struct vxp_rig vxp_rig;

VXP_API vxp_status vxp_rig_generate(int n_cams, uint64_t seed, vxp_rig** out);
VXP_API vxp_status vxp_rig_load(const char* path, vxp_rig** out);
VXP_API vxp_status vxp_rig_save(const vxp_rig* rig, const char* path);
VXP_API vxp_status vxp_rig_count(const vxp_rig* rig, int* out);
VXP_API void vxp_rig_free(vxp_rig* rig);

/* ---- skeleton sets ------------------------------------------------------ */

typedef struct vxp_skeletons vxp_skeletons;

/* Random synthetic scene in the default capture bounds. */
VXP_API vxp_status vxp_scene_generate(int n_people, uint64_t seed, vxp_skeletons** out);
VXP_API vxp_status vxp_skeletons_load(const char* path, const vxp_layout* layout, vxp_skeletons** out);
VXP_API vxp_status vxp_skeletons_save(const vxp_skeletons* skeletons, const vxp_layout* layout, const char* path);
VXP_API vxp_status vxp_skeletons_count(const vxp_skeletons* skeletons, int* out);
VXP_API void vxp_skeletons_free(vxp_skeletons* skeletons);

/* ---- per-view feature maps ---------------------------------------------- */

typedef struct vxp_views vxp_views;

/* Ideal joint-likelihood maps for each camera of the rig. */
VXP_API vxp_status vxp_views_render_ideal(const vxp_skeletons* skeletons, const vxp_rig* rig, int map_width,
                                          int map_height, double stride, double sigma2d, vxp_views** out);
VXP_API vxp_status vxp_views_load(const char* const* paths, int n, vxp_views** out);
VXP_API vxp_status vxp_views_save_one(const vxp_views* views, int index, const char* path);
VXP_API vxp_status vxp_views_count(const vxp_views* views, int* out);
VXP_API void vxp_views_free(vxp_views* views);

/* ---- voxel volumes ------------------------------------------------------ */

typedef struct vxp_volume vxp_volume;

VXP_API vxp_status vxp_volume_load(const char* path, vxp_volume** out);
VXP_API vxp_status vxp_volume_save(const vxp_volume* volume, const char* path);
VXP_API void vxp_volume_free(vxp_volume* volume);

/* ---- pipeline stages ---------------------------------------------------- */

/* Aggregates the views into a voxel volume on the config grid. Without
 * `indices` (NULL, n_indices = 0) the view count must equal the camera
 * count and view i pairs with camera i. With `indices`, n_indices must
 * equal the view count and view i pairs with camera indices[i], which
 * lets a subset of a rig's views drive the unprojection. */
VXP_API vxp_status vxp_unproject_views(const vxp_views* views, const vxp_rig* rig, const int* indices,
                                       int n_indices, const vxp_config* config, vxp_volume** out);

/* Ground-truth volume rendering on the config grid. */
VXP_API vxp_status vxp_render_heatmap_volume(const vxp_skeletons* skeletons, const vxp_layout* layout,
                                             const vxp_config* config, vxp_volume** out);
VXP_API vxp_status vxp_render_vectormap_volume(const vxp_skeletons* skeletons, const vxp_layout* layout,
                                               const vxp_config* config, vxp_volume** out);

/* Peak detection + limb matching + skeleton assembly. */
VXP_API vxp_status vxp_decode_volumes(const vxp_volume* heatmaps, const vxp_volume* vectormaps,
                                      const vxp_layout* layout, const vxp_config* config, vxp_skeletons** out);

/* Per-channel peak list as JSON (grid and world coordinates with scores). */
VXP_API vxp_status vxp_detect_peaks_json(const vxp_volume* heatmaps, const vxp_config* config, char** json_out);

/* Matching-based evaluation of predictions against ground truth. */
VXP_API vxp_status vxp_evaluate_json(const vxp_skeletons* gt, const vxp_skeletons* pred, const vxp_layout* layout,
                                     char** json_out);
VXP_API vxp_status vxp_evaluate_table(const vxp_skeletons* gt, const vxp_skeletons* pred, const vxp_layout* layout,
                                      char** text_out);

/* Scaling benchmark over synthetic workloads; axes given as int arrays. */
VXP_API vxp_status vxp_bench_run(const int* views, int n_views, const int* people, int n_people, int iterations,
                                 int threads, uint64_t seed, char** json_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* VOXPAF_CAPI_H */

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "voxpaf/skeleton.hpp"
#include "voxpaf/volume.hpp"

namespace voxpaf {

// Joint naming plus the limb tree the vectormaps encode. Edges are
// (parent, child) joint indices and must form a tree rooted at "neck".
struct PoseLayout {
  std::vector<std::string> joint_names;
  std::vector<std::pair<int, int>> paf_edges;

  int joint_count() const { return static_cast<int>(joint_names.size()); }
  int paf_count() const { return static_cast<int>(paf_edges.size()); }
  int index_of(const std::string& name) const;  // -1 when absent

  // Throws Error(constraint) unless edges form a tree rooted at the neck.
  void validate() const;

  // 14 keypoints (neck, nose, shoulders, elbows, wrists, hips, knees,
  // ankles) with a 13-edge tree rooted at the neck.
  static PoseLayout cmu14();
};

// Layout JSON: {"joints": [names...], "pafs": [[parent, child], ...]}.
PoseLayout load_layout(const std::string& path);
void save_layout(const PoseLayout& layout, const std::string& path);

// Skeleton JSON: array of {"joints": {name: [x,y,z] | null},
// "confidences": {name: float} (optional)}.
std::vector<Skeleton> load_skeletons(const std::string& path, const PoseLayout& layout);
std::vector<Skeleton> parse_skeletons(const std::string& json_text, const PoseLayout& layout);
void save_skeletons(const std::vector<Skeleton>& skeletons, const PoseLayout& layout, const std::string& path);
std::string skeletons_to_json(const std::vector<Skeleton>& skeletons, const PoseLayout& layout);

// Paired network-style output: per-joint Gaussian heatmaps and per-edge
// 3-channel unit-vector fields on a shared grid.
struct VolumetricOutput {
  Volume heatmaps;    // one channel per joint
  Volume vectormaps;  // three channels per PAF edge: (x, y, z)
};

// Channel value at voxel center x is the max over persons of
// exp(-|x - joint|^2 / (2 (sigma * voxel_size)^2)); absent joints contribute
// nothing. sigma is in voxel units.
Volume render_heatmaps(const std::vector<Skeleton>& skeletons, const VoxelGrid& grid, double sigma_voxels,
                       const PoseLayout& layout);

// Voxels whose centers lie within limb_radius (voxel units, perpendicular
// distance) of a limb segment and within the segment's extent along its axis
// receive the unit vector from parent to child; overlapping same-edge limbs
// of different persons are averaged.
Volume render_vectormaps(const std::vector<Skeleton>& skeletons, const VoxelGrid& grid, const PoseLayout& layout,
                         double limb_radius_voxels);

enum class LossKind { L1, L2, SmoothL1 };

struct LossValue {
  double total = 0.0;
  double heatmap_part = 0.0;
  double vectormap_part = 0.0;
};

// Element-wise loss averaged per part; total = hm_weight * heatmap_part +
// vm_weight * vectormap_part. SmoothL1 uses threshold beta = 1.
LossValue loss(const VolumetricOutput& pred, const VolumetricOutput& gt, LossKind kind, double hm_weight = 1.0,
               double vm_weight = 1.0);

}  // namespace voxpaf

#pragma once

#include <cstdint>
#include <vector>

#include "voxpaf/geometry.hpp"
#include "voxpaf/skeleton.hpp"
#include "voxpaf/targets.hpp"
#include "voxpaf/unproject.hpp"

namespace voxpaf {

// Synthetic-scene generator: stands in for real captures and trained
// networks so the full pipeline can be exercised end to end. Skeletons use
// the standard 14-joint layout.
struct SceneSpec {
  int n_people = 3;
  Vec3 bounds_min{0.0, 0.0, 0.0};
  Vec3 bounds_max{5.0, 5.0, 2.5};  // room-scale capture volume in meters
  double min_separation = 0.6;     // minimum distance between any two skeleton roots
  std::uint64_t seed = 0;

  void validate() const;
};

// Places `n_people` template skeletons (~1.7 m tall) at random positions
// with random facing and per-limb pose jitter of at most 15 degrees.
// Roots are resampled until pairwise separation holds; gives up with a
// constraint error after 1000 attempts per person. Deterministic per seed.
std::vector<Skeleton> generate_scene(const SceneSpec& spec);

// Cameras evenly spaced on a circle of radius 1.3x the bounds half-diagonal
// around the bounds center, heights jittered, each looking at the center.
// Focal lengths are solved per camera so every bounds corner projects at
// least `pad_px` inside the frame. Deterministic per seed.
std::vector<Camera> generate_camera_rig(int n_cams, const Vec3& bounds_min, const Vec3& bounds_max,
                                        std::uint64_t seed, int image_width = 1920, int image_height = 1088,
                                        double pad_px = 16.0);

// Ideal per-view joint-likelihood maps: channel l holds, per texel, the
// max over persons of a 2D Gaussian (sigma2d in feature-map pixels)
// centered on the projection of joint l. Joints behind a camera leave that
// channel untouched. One map per camera, indexed alike.
std::vector<FeatureMap2D> render_ideal_views(const std::vector<Skeleton>& skeletons,
                                             const std::vector<Camera>& cameras, int map_width, int map_height,
                                             double stride, double sigma2d = 2.0);

}  // namespace voxpaf

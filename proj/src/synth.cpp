#include "voxpaf/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace voxpaf {

namespace {

constexpr double kNeckHeight = 1.45;      // meters above the floor
constexpr double kNeckHeightJitter = 0.05;
constexpr double kPlacementMargin = 0.6;  // keeps every limb inside the bounds
constexpr double kMaxLimbJitterRad = 15.0 * std::numbers::pi / 180.0;
constexpr int kPlacementAttempts = 1000;

// Parent-to-child offsets of the template skeleton, in meters, for a person
// facing +x. Indexed like PoseLayout::cmu14().paf_edges.
const Vec3 kTemplateOffsets[13] = {
    {0.0, 0.0, 0.17},     // neck -> nose
    {0.0, 0.20, -0.05},   // neck -> l_shoulder
    {0.0, -0.20, -0.05},  // neck -> r_shoulder
    {0.0, 0.02, -0.28},   // l_shoulder -> l_elbow
    {0.0, -0.02, -0.28},  // r_shoulder -> r_elbow
    {0.0, 0.01, -0.26},   // l_elbow -> l_wrist
    {0.0, -0.01, -0.26},  // r_elbow -> r_wrist
    {0.0, 0.12, -0.50},   // neck -> l_hip
    {0.0, -0.12, -0.50},  // neck -> r_hip
    {0.0, 0.01, -0.45},   // l_hip -> l_knee
    {0.0, -0.01, -0.45},  // r_hip -> r_knee
    {0.0, 0.0, -0.42},    // l_knee -> l_ankle
    {0.0, 0.0, -0.42},    // r_knee -> r_ankle
};

Vec3 rotate_about_axis(const Vec3& v, const Vec3& axis, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return v * c + axis.cross(v) * s + axis * (axis.dot(v) * (1.0 - c));
}

Vec3 rotate_yaw(const Vec3& v, double yaw) {
  const double c = std::cos(yaw), s = std::sin(yaw);
  return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

}  // namespace

void SceneSpec::validate() const {
  if (n_people < 0) throw Error(ErrorCode::invalid_argument, "scene: n_people must be >= 0");
  const Vec3 extent = bounds_max - bounds_min;
  if (!(extent.x > 0.0 && extent.y > 0.0 && extent.z > 0.0))
    throw Error(ErrorCode::invalid_argument, "scene: bounds must have positive extent");
  if (min_separation < 0.0) throw Error(ErrorCode::invalid_argument, "scene: min_separation must be >= 0");
  if (n_people > 0) {
    if (extent.x <= 2.0 * kPlacementMargin || extent.y <= 2.0 * kPlacementMargin)
      throw Error(ErrorCode::constraint, "scene: bounds too small to place people with limb clearance");
    if (extent.z < 1.8) throw Error(ErrorCode::constraint, "scene: bounds too low for standing people");
  }
}

std::vector<Skeleton> generate_scene(const SceneSpec& spec) {
  spec.validate();
  const PoseLayout layout = PoseLayout::cmu14();
  Rng rng(spec.seed);

  std::vector<Vec3> roots;
  std::vector<Skeleton> skeletons;
  for (int p = 0; p < spec.n_people; ++p) {
    double x = 0.0, y = 0.0;
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
      x = rng.uniform(spec.bounds_min.x + kPlacementMargin, spec.bounds_max.x - kPlacementMargin);
      y = rng.uniform(spec.bounds_min.y + kPlacementMargin, spec.bounds_max.y - kPlacementMargin);
      placed = std::all_of(roots.begin(), roots.end(), [&](const Vec3& r) {
        const double dx = r.x - x, dy = r.y - y;
        return std::sqrt(dx * dx + dy * dy) >= spec.min_separation;
      });
    }
    if (!placed)
      throw Error(ErrorCode::constraint, "scene: could not satisfy min_separation after 1000 attempts");

    const double z = spec.bounds_min.z + kNeckHeight + rng.uniform(-kNeckHeightJitter, kNeckHeightJitter);
    const double yaw = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const Vec3 neck{x, y, z};
    roots.push_back(neck);

    Skeleton s;
    s.joints.assign(static_cast<std::size_t>(layout.joint_count()), std::nullopt);
    s.joints[0] = Joint{neck, 1.0};
    for (int e = 0; e < layout.paf_count(); ++e) {
      const auto [parent, child] = layout.paf_edges[static_cast<std::size_t>(e)];
      const Vec3 axis = rng.unit_vector();
      const double angle = rng.uniform(0.0, kMaxLimbJitterRad);
      const Vec3 offset = rotate_about_axis(rotate_yaw(kTemplateOffsets[e], yaw), axis, angle);
      s.joints[static_cast<std::size_t>(child)] =
          Joint{s.joints[static_cast<std::size_t>(parent)]->position + offset, 1.0};
    }
    skeletons.push_back(std::move(s));
  }
  return skeletons;
}

std::vector<Camera> generate_camera_rig(int n_cams, const Vec3& bounds_min, const Vec3& bounds_max,
                                        std::uint64_t seed, int image_width, int image_height, double pad_px) {
  if (n_cams < 1) throw Error(ErrorCode::invalid_argument, "camera rig: need at least 1 camera");
  if (image_width < 2 || image_height < 2)
    throw Error(ErrorCode::invalid_argument, "camera rig: image dimensions too small");
  if (!(pad_px >= 0.0 && 2.0 * pad_px < image_width && 2.0 * pad_px < image_height))
    throw Error(ErrorCode::invalid_argument, "camera rig: pad does not fit in the image");

  const Vec3 center = (bounds_min + bounds_max) * 0.5;
  const Vec3 extent = bounds_max - bounds_min;
  const double radius = 1.3 * 0.5 * extent.norm();
  Rng rng(seed);

  std::vector<Vec3> corners;
  for (int cx = 0; cx <= 1; ++cx)
    for (int cy = 0; cy <= 1; ++cy)
      for (int cz = 0; cz <= 1; ++cz)
        corners.push_back({cx ? bounds_max.x : bounds_min.x, cy ? bounds_max.y : bounds_min.y,
                           cz ? bounds_max.z : bounds_min.z});

  std::vector<Camera> rig;
  for (int i = 0; i < n_cams; ++i) {
    const double angle = 2.0 * std::numbers::pi * i / n_cams;
    const double height_jitter = rng.uniform(-0.25, 0.25) * extent.z;
    const Vec3 position{center.x + radius * std::cos(angle), center.y + radius * std::sin(angle),
                        center.z + height_jitter};

    // Look-at frame with image y pointing down in the world.
    const Vec3 forward = (center - position).normalized();
    const Vec3 right = forward.cross(Vec3{0.0, 0.0, 1.0}).normalized();
    const Vec3 down = forward.cross(right);

    Camera cam;
    cam.id = "cam" + std::string(i < 10 ? "0" : "") + std::to_string(i);
    cam.width = image_width;
    cam.height = image_height;
    cam.cx = image_width / 2.0;
    cam.cy = image_height / 2.0;
    cam.rotation = Mat3{{right.x, right.y, right.z, down.x, down.y, down.z, forward.x, forward.y, forward.z}};
    cam.translation = Vec3{-right.dot(position), -down.dot(position), -forward.dot(position)};

    // Largest shared focal length that keeps every bounds corner at least
    // pad_px away from the frame border.
    double focal = std::numeric_limits<double>::infinity();
    for (const Vec3& corner : corners) {
      const Vec3 rel = corner - position;
      const double depth = forward.dot(rel);
      const double xn = right.dot(rel) / depth;
      const double yn = down.dot(rel) / depth;
      if (std::abs(xn) > 0.0) focal = std::min(focal, (image_width / 2.0 - pad_px) / std::abs(xn));
      if (std::abs(yn) > 0.0) focal = std::min(focal, (image_height / 2.0 - pad_px) / std::abs(yn));
    }
    cam.fx = cam.fy = focal;
    cam.validate();
    rig.push_back(std::move(cam));
  }
  return rig;
}

std::vector<FeatureMap2D> render_ideal_views(const std::vector<Skeleton>& skeletons,
                                             const std::vector<Camera>& cameras, int map_width, int map_height,
                                             double stride, double sigma2d) {
  if (map_width < 1 || map_height < 1)
    throw Error(ErrorCode::invalid_argument, "render_ideal_views: map dimensions must be positive");
  if (!(stride > 0.0)) throw Error(ErrorCode::invalid_argument, "render_ideal_views: stride must be positive");
  if (!(sigma2d > 0.0)) throw Error(ErrorCode::invalid_argument, "render_ideal_views: sigma2d must be positive");

  int n_joints = -1;
  for (const Skeleton& s : skeletons) {
    if (n_joints == -1) n_joints = static_cast<int>(s.joints.size());
    if (static_cast<int>(s.joints.size()) != n_joints)
      throw Error(ErrorCode::invalid_argument, "render_ideal_views: skeletons have differing joint counts");
  }
  if (n_joints == -1) n_joints = PoseLayout::cmu14().joint_count();

  const double inv_two_sigma_sq = 1.0 / (2.0 * sigma2d * sigma2d);
  const double cutoff = 14.6 * sigma2d + 1.0;  // beyond this the Gaussian rounds to zero in float

  std::vector<FeatureMap2D> maps;
  maps.reserve(cameras.size());
  for (const Camera& cam : cameras) {
    FeatureMap2D map;
    map.width = map_width;
    map.height = map_height;
    map.channels = n_joints;
    map.stride = stride;
    map.data.assign(static_cast<std::size_t>(map_width) * map_height * n_joints, 0.0f);

    for (const Skeleton& s : skeletons) {
      for (int l = 0; l < n_joints; ++l) {
        const auto& joint = s.joints[static_cast<std::size_t>(l)];
        if (!joint) continue;
        const std::optional<Point2> proj = project(cam, joint->position);
        if (!proj) continue;
        const double px = proj->u / stride;
        const double py = proj->v / stride;
        const int x0 = std::max(0, static_cast<int>(std::floor(px - cutoff)));
        const int x1 = std::min(map_width - 1, static_cast<int>(std::ceil(px + cutoff)));
        const int y0 = std::max(0, static_cast<int>(std::floor(py - cutoff)));
        const int y1 = std::min(map_height - 1, static_cast<int>(std::ceil(py + cutoff)));
        for (int y = y0; y <= y1; ++y)
          for (int x = x0; x <= x1; ++x) {
            const double dx = x - px, dy = y - py;
            const float val = static_cast<float>(std::exp(-(dx * dx + dy * dy) * inv_two_sigma_sq));
            float& cell = map.data[map.index(x, y, l)];
            cell = std::max(cell, val);
          }
      }
    }
    maps.push_back(std::move(map));
  }
  return maps;
}

}  // namespace voxpaf

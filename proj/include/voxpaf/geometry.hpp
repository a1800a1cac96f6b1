#pragma once

#include <optional>
#include <string>
#include <vector>

#include "voxpaf/common.hpp"

namespace voxpaf {

// Pinhole camera with world-to-camera extrinsics: pc = R * p + t.
struct Camera {
  std::string id;
  double fx = 1.0, fy = 1.0;
  double cx = 0.0, cy = 0.0;
  int width = 1;
  int height = 1;
  Mat3 rotation;     // world -> camera
  Vec3 translation;  // meters

  // Optical center in world coordinates: -R^T * t.
  Vec3 center() const { return rotation.transposed() * (translation * -1.0); }

  // Throws Error(constraint) when the rotation is not a proper rotation
  // (tolerance 1e-6 on R^T R - I and det - 1) or focal lengths/extent are invalid.
  void validate() const;
};

// Minimum forward depth; points with z_cam <= this are behind the camera plane.
inline constexpr double kBehindCameraEps = 1e-6;

// Projects a world point to continuous pixel coordinates. Empty when the
// point is at or behind the camera plane. The result may lie outside the
// image bounds.
std::optional<Point2> project(const Camera& camera, const Point3& p);

// Calibration JSON: array of {"id", "width", "height", "K": [fx,fy,cx,cy],
// "R": 9 row-major floats, "t": 3 floats}.
std::vector<Camera> load_calibration(const std::string& path);
std::vector<Camera> parse_calibration(const std::string& json_text);
void save_calibration(const std::vector<Camera>& cameras, const std::string& path);
std::string calibration_to_json(const std::vector<Camera>& cameras);

}  // namespace voxpaf

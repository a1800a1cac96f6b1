#include "voxpaf/geometry.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace voxpaf {

namespace {

using ordered_json = nlohmann::ordered_json;

double max_abs_off_identity(const Mat3& m) {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double target = i == j ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(m(i, j) - target));
    }
  return worst;
}

}  // namespace

void Camera::validate() const {
  const std::string who = id.empty() ? "<unnamed>" : id;
  if (!(fx > 0.0) || !(fy > 0.0))
    throw Error(ErrorCode::constraint, "camera " + who + ": focal lengths must be positive");
  if (width < 1 || height < 1)
    throw Error(ErrorCode::constraint, "camera " + who + ": image extent must be positive");
  if (!std::isfinite(cx) || !std::isfinite(cy) || !translation.finite())
    throw Error(ErrorCode::constraint, "camera " + who + ": non-finite parameters");
  constexpr double tol = 1e-6;
  Mat3 rtr = rotation.transposed() * rotation;
  if (max_abs_off_identity(rtr) > tol)
    throw Error(ErrorCode::constraint, "camera " + who + ": rotation is not orthonormal");
  if (std::abs(rotation.det() - 1.0) > tol)
    throw Error(ErrorCode::constraint, "camera " + who + ": rotation determinant is not +1");
}

std::optional<Point2> project(const Camera& camera, const Point3& p) {
  Vec3 pc = camera.rotation * p + camera.translation;
  if (pc.z <= kBehindCameraEps) return std::nullopt;
  return Point2{camera.fx * pc.x / pc.z + camera.cx, camera.fy * pc.y / pc.z + camera.cy};
}

std::vector<Camera> parse_calibration(const std::string& json_text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::parse, std::string("calibration: invalid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::parse, "calibration: top-level value must be an array");

  std::vector<Camera> cameras;
  cameras.reserve(doc.size());
  for (const auto& entry : doc) {
    Camera cam;
    try {
      cam.id = entry.at("id").get<std::string>();
      cam.width = entry.at("width").get<int>();
      cam.height = entry.at("height").get<int>();
      const auto& k = entry.at("K");
      if (k.size() != 4) throw std::runtime_error("K must have 4 entries");
      cam.fx = k[0].get<double>();
      cam.fy = k[1].get<double>();
      cam.cx = k[2].get<double>();
      cam.cy = k[3].get<double>();
      const auto& r = entry.at("R");
      if (r.size() != 9) throw std::runtime_error("R must have 9 entries");
      for (int i = 0; i < 9; ++i) cam.rotation.m[i] = r[i].get<double>();
      const auto& t = entry.at("t");
      if (t.size() != 3) throw std::runtime_error("t must have 3 entries");
      cam.translation = {t[0].get<double>(), t[1].get<double>(), t[2].get<double>()};
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw Error(ErrorCode::parse, "calibration: malformed camera entry: " + std::string(e.what()));
    }
    cam.validate();
    cameras.push_back(std::move(cam));
  }
  return cameras;
}

std::vector<Camera> load_calibration(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "calibration: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_calibration(buf.str());
}

std::string calibration_to_json(const std::vector<Camera>& cameras) {
  ordered_json doc = ordered_json::array();
  for (const Camera& cam : cameras) {
    ordered_json entry;
    entry["id"] = cam.id;
    entry["width"] = cam.width;
    entry["height"] = cam.height;
    entry["K"] = {cam.fx, cam.fy, cam.cx, cam.cy};
    entry["R"] = cam.rotation.m;
    entry["t"] = {cam.translation.x, cam.translation.y, cam.translation.z};
    doc.push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

void save_calibration(const std::vector<Camera>& cameras, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "calibration: cannot write " + path);
  out << calibration_to_json(cameras);
  if (!out) throw Error(ErrorCode::io, "calibration: write failed for " + path);
}

}  // namespace voxpaf

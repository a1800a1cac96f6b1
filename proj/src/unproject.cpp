#include "voxpaf/unproject.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace voxpaf {

namespace {

using ordered_json = nlohmann::ordered_json;

// Adds weight * texel into acc for the four texels around a feature-space
// location; texels outside the map count as zero.
inline void accumulate_bilinear(const FeatureMap2D& f, double fx, double fy, double* acc) {
  if (fx <= -1.0 || fy <= -1.0 || fx >= static_cast<double>(f.width) || fy >= static_cast<double>(f.height)) return;
  const int x0 = static_cast<int>(std::floor(fx));
  const int y0 = static_cast<int>(std::floor(fy));
  const double wx = fx - x0;
  const double wy = fy - y0;
  const double w[4] = {(1.0 - wx) * (1.0 - wy), wx * (1.0 - wy), (1.0 - wx) * wy, wx * wy};
  const int xs[4] = {x0, x0 + 1, x0, x0 + 1};
  const int ys[4] = {y0, y0, y0 + 1, y0 + 1};
  for (int k = 0; k < 4; ++k) {
    if (w[k] == 0.0) continue;
    if (xs[k] < 0 || xs[k] >= f.width || ys[k] < 0 || ys[k] >= f.height) continue;
    const float* texel = &f.data[f.index(xs[k], ys[k], 0)];
    for (int c = 0; c < f.channels; ++c) acc[c] += w[k] * texel[c];
  }
}

}  // namespace

FeatureMap2D::FeatureMap2D(int w, int h, int c, double stride_) : width(w), height(h), channels(c), stride(stride_) {
  if (width < 1 || height < 1 || channels < 1)
    throw Error(ErrorCode::constraint, "feature map: extent and channels must be positive");
  if (!(stride > 0.0)) throw Error(ErrorCode::constraint, "feature map: stride must be positive");
  data.assign(static_cast<std::size_t>(width) * height * channels, 0.0f);
}

std::vector<double> sample_bilinear(const FeatureMap2D& f, const Point2& image_px) {
  std::vector<double> out(static_cast<std::size_t>(f.channels), 0.0);
  accumulate_bilinear(f, image_px.u / f.stride, image_px.v / f.stride, out.data());
  return out;
}

Volume unproject(std::span<const ViewRef> views, const VoxelGrid& grid, const UnprojectOptions& options) {
  if (views.empty()) throw Error(ErrorCode::invalid_argument, "unproject: need at least one view");
  grid.validate();
  const int channels = views[0].map->channels;
  for (const ViewRef& v : views) {
    if (v.map == nullptr || v.camera == nullptr)
      throw Error(ErrorCode::invalid_argument, "unproject: null view entry");
    if (v.map->channels != channels)
      throw Error(ErrorCode::invalid_argument, "unproject: feature maps disagree on channel count");
  }

  // Camera-space coordinates of voxel centers are affine in the voxel index;
  // precompute the per-axis steps once per view.
  struct ViewLattice {
    Vec3 base, step_x, step_y, step_z;
    const FeatureMap2D* map;
    const Camera* cam;
  };
  std::vector<ViewLattice> lattices;
  lattices.reserve(views.size());
  for (const ViewRef& v : views) {
    const double s = grid.voxel_size;
    ViewLattice lat;
    lat.base = v.camera->rotation * grid_to_world(grid, Vec3{0, 0, 0}) + v.camera->translation;
    lat.step_x = v.camera->rotation * Vec3{s, 0, 0};
    lat.step_y = v.camera->rotation * Vec3{0, s, 0};
    lat.step_z = v.camera->rotation * Vec3{0, 0, s};
    lat.map = v.map;
    lat.cam = v.camera;
    lattices.push_back(lat);
  }

  Volume out(grid, channels);
  const int qx = grid.dims[0], qy = grid.dims[1], qz = grid.dims[2];
  const double m = static_cast<double>(views.size());

  parallel_for(qx, options.threads, [&](std::int64_t x_begin, std::int64_t x_end) {
    std::vector<double> acc(static_cast<std::size_t>(channels));
    for (std::int64_t x = x_begin; x < x_end; ++x) {
      for (int y = 0; y < qy; ++y) {
        for (int z = 0; z < qz; ++z) {
          std::fill(acc.begin(), acc.end(), 0.0);
          int contributing = 0;
          for (const ViewLattice& lat : lattices) {
            Vec3 pc = lat.base + lat.step_x * static_cast<double>(x) + lat.step_y * static_cast<double>(y) +
                      lat.step_z * static_cast<double>(z);
            if (pc.z <= kBehindCameraEps) continue;
            const double u = lat.cam->fx * pc.x / pc.z + lat.cam->cx;
            const double v = lat.cam->fy * pc.y / pc.z + lat.cam->cy;
            const double fx = u / lat.map->stride;
            const double fy = v / lat.map->stride;
            if (fx <= -1.0 || fy <= -1.0 || fx >= lat.map->width || fy >= lat.map->height) continue;
            accumulate_bilinear(*lat.map, fx, fy, acc.data());
            ++contributing;
          }
          const double divisor = options.visibility_normalized ? std::max(contributing, 1) : m;
          float* dst = &out.data[out.index(static_cast<int>(x), y, z, 0)];
          for (int c = 0; c < channels; ++c) dst[c] = static_cast<float>(acc[c] / divisor);
        }
      }
    }
  });
  return out;
}

void save_feature_map(const FeatureMap2D& f, const std::string& path) {
  ordered_json header;
  header["origin"] = {0.0, 0.0, 0.0};
  header["dims"] = {f.width, f.height, 1};
  header["voxel_size"] = 1.0;
  header["channels"] = f.channels;
  header["channel_names"] = ordered_json::array();
  header["stride"] = f.stride;
  // Container order is x-major: transpose from the row-major map storage.
  std::vector<float> samples(static_cast<std::size_t>(f.width) * f.height * f.channels);
  std::size_t k = 0;
  for (int x = 0; x < f.width; ++x)
    for (int y = 0; y < f.height; ++y)
      for (int c = 0; c < f.channels; ++c) samples[k++] = f.at(x, y, c);
  detail::write_container(path, header.dump(), samples);
}

FeatureMap2D load_feature_map(const std::string& path) {
  auto [header_text, samples] = detail::read_container(path);
  int w = 0, h = 0, channels = 0, zdim = 0;
  double stride = 0.0;
  try {
    ordered_json header = ordered_json::parse(header_text);
    const auto& d = header.at("dims");
    w = d.at(0).get<int>();
    h = d.at(1).get<int>();
    zdim = d.at(2).get<int>();
    channels = header.at("channels").get<int>();
    stride = header.at("stride").get<double>();
  } catch (const std::exception& e) {
    throw Error(ErrorCode::parse, "feature map dump: malformed header in " + path + ": " + e.what());
  }
  if (zdim != 1) throw Error(ErrorCode::parse, "feature map dump: z dimension must be 1 in " + path);

  FeatureMap2D f(w, h, channels, stride);
  if (samples.size() != f.data.size())
    throw Error(ErrorCode::parse, "feature map dump: sample count does not match header in " + path);
  std::size_t k = 0;
  for (int x = 0; x < w; ++x)
    for (int y = 0; y < h; ++y)
      for (int c = 0; c < channels; ++c) f.at(x, y, c) = samples[k++];
  return f;
}

}  // namespace voxpaf

#pragma once

#include <span>
#include <string>
#include <vector>

#include "voxpaf/geometry.hpp"
#include "voxpaf/volume.hpp"

namespace voxpaf {

// Per-view 2D feature map at a fixed stride below camera image resolution.
// Image pixel (u, v) maps to feature coordinate (u / stride, v / stride);
// texel centers sit at integer feature coordinates. Storage is row-major
// H x W x C (channel fastest).
struct FeatureMap2D {
  int width = 0;
  int height = 0;
  int channels = 0;
  double stride = 16.0;  // camera image pixels per feature-map pixel
  std::vector<float> data;

  FeatureMap2D() = default;
  FeatureMap2D(int w, int h, int c, double stride_);

  std::int64_t index(int x, int y, int c) const {
    return (static_cast<std::int64_t>(y) * width + x) * channels + c;
  }
  float at(int x, int y, int c) const { return data[index(x, y, c)]; }
  float& at(int x, int y, int c) { return data[index(x, y, c)]; }
};

// Bilinear sample at an image-pixel location; texels outside
// [0, W-1] x [0, H-1] contribute zeros (zero-padding border).
std::vector<double> sample_bilinear(const FeatureMap2D& f, const Point2& image_px);

struct ViewRef {
  const FeatureMap2D* map = nullptr;
  const Camera* camera = nullptr;
};

struct UnprojectOptions {
  // When true, each voxel is divided by the number of views that actually
  // contributed instead of the total view count m.
  bool visibility_normalized = false;
  int threads = 0;  // <= 0 selects hardware concurrency
};

/// Aggregates m per-view feature maps into one volume: each voxel center is
// projected into every view, the maps are bilinearly sampled there, and the
// samples are averaged over the m views. Voxels behind a camera or sampling
// outside a map receive a zero contribution from that view.
Volume unproject(std::span<const ViewRef> views, const VoxelGrid& grid, const UnprojectOptions& options = {});

// Feature maps share the volume dump container with dims (W, H, 1) plus a
// "stride" header field.
void save_feature_map(const FeatureMap2D& f, const std::string& path);
FeatureMap2D load_feature_map(const std::string& path);

}  // namespace voxpaf

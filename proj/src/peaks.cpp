#include "voxpaf/peaks.hpp"

#include <algorithm>
#include <cmath>

namespace voxpaf {

namespace {

void check_channel(const Volume& heatmaps, int channel, const char* what) {
  if (channel < 0 || channel >= heatmaps.channels)
    throw Error(ErrorCode::invalid_argument, std::string(what) + ": channel out of range");
}

struct IndexedPeak {
  std::array<int, 3> voxel;
  double score;
};

}  // namespace

std::vector<Peak> find_peaks(const Volume& heatmaps, int channel, const PeakParams& params) {
  check_channel(heatmaps, channel, "find_peaks");
  if (params.radius < 1) throw Error(ErrorCode::invalid_argument, "find_peaks: radius must be >= 1");
  const auto& dims = heatmaps.grid.dims;
  const int r = params.radius;

  std::vector<IndexedPeak> found;
  for (int x = 0; x < dims[0]; ++x) {
    for (int y = 0; y < dims[1]; ++y) {
      for (int z = 0; z < dims[2]; ++z) {
        const float h = heatmaps.at(x, y, z, channel);
        if (static_cast<double>(h) < params.threshold) continue;
        const int x0 = std::max(0, x - r), x1 = std::min(dims[0] - 1, x + r);
        const int y0 = std::max(0, y - r), y1 = std::min(dims[1] - 1, y + r);
        const int z0 = std::max(0, z - r), z1 = std::min(dims[2] - 1, z + r);
        bool is_peak = true;
        for (int nx = x0; nx <= x1 && is_peak; ++nx)
          for (int ny = y0; ny <= y1 && is_peak; ++ny)
            for (int nz = z0; nz <= z1 && is_peak; ++nz) {
              const float v = heatmaps.at(nx, ny, nz, channel);
              if (v > h) {
                is_peak = false;
              } else if (v == h && std::array<int, 3>{nx, ny, nz} < std::array<int, 3>{x, y, z}) {
                // On a flat plateau only the lexicographically smallest voxel wins.
                is_peak = false;
              }
            }
        if (is_peak) found.push_back({{x, y, z}, static_cast<double>(h)});
      }
    }
  }

  std::sort(found.begin(), found.end(), [](const IndexedPeak& a, const IndexedPeak& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.voxel < b.voxel;
  });

  std::vector<Peak> peaks;
  peaks.reserve(found.size());
  for (const IndexedPeak& p : found)
    peaks.push_back({Vec3{static_cast<double>(p.voxel[0]), static_cast<double>(p.voxel[1]),
                          static_cast<double>(p.voxel[2])},
                     p.score});
  return peaks;
}

Vec3 refine_subvoxel(const Volume& heatmaps, int channel, const std::array<int, 3>& voxel, int radius) {
  check_channel(heatmaps, channel, "refine_subvoxel");
  if (radius < 1) throw Error(ErrorCode::invalid_argument, "refine_subvoxel: radius must be >= 1");
  const auto& dims = heatmaps.grid.dims;
  for (int a = 0; a < 3; ++a)
    if (voxel[a] < 0 || voxel[a] >= dims[a])
      throw Error(ErrorCode::invalid_argument, "refine_subvoxel: voxel out of range");

  const int x0 = std::max(0, voxel[0] - radius), x1 = std::min(dims[0] - 1, voxel[0] + radius);
  const int y0 = std::max(0, voxel[1] - radius), y1 = std::min(dims[1] - 1, voxel[1] + radius);
  const int z0 = std::max(0, voxel[2] - radius), z1 = std::min(dims[2] - 1, voxel[2] + radius);

  double mass = 0.0;
  Vec3 weighted{0.0, 0.0, 0.0};
  for (int x = x0; x <= x1; ++x)
    for (int y = y0; y <= y1; ++y)
      for (int z = z0; z <= z1; ++z) {
        const double w = std::max(0.0, static_cast<double>(heatmaps.at(x, y, z, channel)));
        mass += w;
        weighted = weighted + Vec3{static_cast<double>(x), static_cast<double>(y), static_cast<double>(z)} * w;
      }
  if (!(mass > 0.0))
    throw Error(ErrorCode::constraint, "refine_subvoxel: neighborhood has no positive mass");
  return weighted / mass;
}

std::vector<std::vector<Peak>> detect_peaks(const Volume& heatmaps, const PeakParams& params) {
  std::vector<std::vector<Peak>> per_channel(static_cast<std::size_t>(heatmaps.channels));
  for (int c = 0; c < heatmaps.channels; ++c) {
    std::vector<Peak> peaks = find_peaks(heatmaps, c, params);
    if (params.refine) {
      for (Peak& p : peaks) {
        const std::array<int, 3> voxel = {static_cast<int>(std::lround(p.position.x)),
                                          static_cast<int>(std::lround(p.position.y)),
                                          static_cast<int>(std::lround(p.position.z))};
        p.position = refine_subvoxel(heatmaps, c, voxel, params.radius);
      }
    }
    per_channel[static_cast<std::size_t>(c)] = std::move(peaks);
  }
  return per_channel;
}

}  // namespace voxpaf

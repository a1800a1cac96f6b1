// Independent reference implementations ("oracles") the tests compare the
// library against. Everything here is deliberately written from first
// principles — plain loops and textbook formulas — so agreement with the
// library is meaningful.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "voxpaf/geometry.hpp"
#include "voxpaf/unproject.hpp"
#include "voxpaf/volume.hpp"

namespace oracle {

// Projection via an explicit 3x4 homogeneous matrix P = K [R | t].
inline std::optional<voxpaf::Point2> project_homogeneous(const voxpaf::Camera& cam, const voxpaf::Vec3& p) {
  double P[3][4];
  const double K[3][3] = {{cam.fx, 0.0, cam.cx}, {0.0, cam.fy, cam.cy}, {0.0, 0.0, 1.0}};
  const double t[3] = {cam.translation.x, cam.translation.y, cam.translation.z};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      double sum = 0.0;
      for (int k = 0; k < 3; ++k) sum += K[r][k] * cam.rotation.m[static_cast<std::size_t>(3 * k + c)];
      P[r][c] = sum;
    }
    double sum = 0.0;
    for (int k = 0; k < 3; ++k) sum += K[r][k] * t[k];
    P[r][3] = sum;
  }
  const double x[4] = {p.x, p.y, p.z, 1.0};
  double h[3];
  for (int r = 0; r < 3; ++r)
    h[r] = P[r][0] * x[0] + P[r][1] * x[1] + P[r][2] * x[2] + P[r][3] * x[3];
  if (h[2] <= 1e-6) return std::nullopt;
  return voxpaf::Point2{h[0] / h[2], h[1] / h[2]};
}

// Bilinear interpolation with the explicit 4-corner weight formula.
inline std::vector<double> sample_bilinear_weights(const voxpaf::FeatureMap2D& f, const voxpaf::Point2& image_px) {
  const double fx = image_px.u / f.stride;
  const double fy = image_px.v / f.stride;
  const int x0 = static_cast<int>(std::floor(fx));
  const int y0 = static_cast<int>(std::floor(fy));
  const double ax = fx - x0, ay = fy - y0;
  const double w[4] = {(1 - ax) * (1 - ay), ax * (1 - ay), (1 - ax) * ay, ax * ay};
  const int cx[4] = {x0, x0 + 1, x0, x0 + 1};
  const int cy[4] = {y0, y0, y0 + 1, y0 + 1};

  std::vector<double> out(static_cast<std::size_t>(f.channels), 0.0);
  for (int corner = 0; corner < 4; ++corner) {
    if (cx[corner] < 0 || cx[corner] >= f.width || cy[corner] < 0 || cy[corner] >= f.height) continue;
    for (int c = 0; c < f.channels; ++c)
      out[static_cast<std::size_t>(c)] += w[corner] * f.at(cx[corner], cy[corner], c);
  }
  return out;
}

// Per-voxel unprojection, nothing shared with the library's fast path: for
// every voxel center, project into every view, bilinearly sample, average.
inline voxpaf::Volume unproject_naive(const std::vector<voxpaf::ViewRef>& views, const voxpaf::VoxelGrid& grid,
                                      bool visibility_normalized = false) {
  const int channels = views.front().map->channels;
  voxpaf::Volume out(grid, channels);
  for (int x = 0; x < grid.dims[0]; ++x)
    for (int y = 0; y < grid.dims[1]; ++y)
      for (int z = 0; z < grid.dims[2]; ++z) {
        const voxpaf::Vec3 world{grid.origin.x + (x + 0.5) * grid.voxel_size,
                                 grid.origin.y + (y + 0.5) * grid.voxel_size,
                                 grid.origin.z + (z + 0.5) * grid.voxel_size};
        std::vector<double> acc(static_cast<std::size_t>(channels), 0.0);
        int contributing = 0;
        for (const voxpaf::ViewRef& view : views) {
          const auto proj = project_homogeneous(*view.camera, world);
          if (!proj) continue;
          ++contributing;
          const std::vector<double> sample = sample_bilinear_weights(*view.map, *proj);
          for (int c = 0; c < channels; ++c) acc[static_cast<std::size_t>(c)] += sample[static_cast<std::size_t>(c)];
        }
        const double divisor = visibility_normalized ? std::max(contributing, 1) : static_cast<int>(views.size());
        for (int c = 0; c < channels; ++c)
          out.at(x, y, z, c) = static_cast<float>(acc[static_cast<std::size_t>(c)] / divisor);
      }
  return out;
}

// Exhaustive neighborhood-max scan; mirrors the suppression definition
// directly, one voxel at a time.
inline std::vector<std::array<int, 3>> nms_scan(const voxpaf::Volume& v, int channel, int radius, double threshold) {
  std::vector<std::array<int, 3>> peaks;
  const auto& d = v.grid.dims;
  for (int x = 0; x < d[0]; ++x)
    for (int y = 0; y < d[1]; ++y)
      for (int z = 0; z < d[2]; ++z) {
        const float h = v.at(x, y, z, channel);
        if (static_cast<double>(h) < threshold) continue;
        bool keep = true;
        for (int nx = std::max(0, x - radius); nx <= std::min(d[0] - 1, x + radius) && keep; ++nx)
          for (int ny = std::max(0, y - radius); ny <= std::min(d[1] - 1, y + radius) && keep; ++ny)
            for (int nz = std::max(0, z - radius); nz <= std::min(d[2] - 1, z + radius) && keep; ++nz) {
              const float n = v.at(nx, ny, nz, channel);
              if (n > h) keep = false;
              if (n == h && std::array{nx, ny, nz} < std::array{x, y, z}) keep = false;
            }
        if (keep) peaks.push_back({x, y, z});
      }
  return peaks;
}

// Element-wise loss formulas as plain scalars.
inline double scalar_l1(double d) { return std::fabs(d); }
inline double scalar_l2(double d) { return d * d; }
inline double scalar_smooth_l1(double d) { return std::fabs(d) < 1.0 ? 0.5 * d * d : std::fabs(d) - 0.5; }

// Minimum-cost assignment by trying every permutation (rows <= cols).
// Entries >= skip_at are treated as forbidden. Returns col per row, -1 when
// unmatched, preferring the most real matches, then the lowest total cost.
inline std::vector<int> assignment_brute_force(const std::vector<std::vector<double>>& cost, double skip_at) {
  const int n = static_cast<int>(cost.size());
  if (n == 0) return {};
  const int m = static_cast<int>(cost.front().size());
  std::vector<int> cols(static_cast<std::size_t>(m));
  std::iota(cols.begin(), cols.end(), 0);

  std::vector<int> best(static_cast<std::size_t>(n), -1);
  int best_real = -1;
  double best_cost = 0.0;
  std::vector<int> perm = cols;
  // Permute column subsets of size n over all m columns.
  std::sort(perm.begin(), perm.end());
  do {
    int real = 0;
    double total = 0.0;
    for (int r = 0; r < std::min(n, m); ++r) {
      const double c = cost[static_cast<std::size_t>(r)][static_cast<std::size_t>(perm[static_cast<std::size_t>(r)])];
      if (c < skip_at) {
        ++real;
        total += c;
      }
    }
    if (real > best_real || (real == best_real && total < best_cost - 1e-15)) {
      best_real = real;
      best_cost = total;
      std::fill(best.begin(), best.end(), -1);
      for (int r = 0; r < std::min(n, m); ++r) {
        const double c =
            cost[static_cast<std::size_t>(r)][static_cast<std::size_t>(perm[static_cast<std::size_t>(r)])];
        if (c < skip_at) best[static_cast<std::size_t>(r)] = perm[static_cast<std::size_t>(r)];
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// The greedy matching rule replayed from a scored candidate list.
struct ScoredPair {
  double score;
  int parent;
  int child;
};

inline std::vector<std::array<int, 2>> greedy_replay(std::vector<ScoredPair> pairs, double threshold) {
  std::erase_if(pairs, [&](const ScoredPair& p) { return p.score < threshold; });
  std::sort(pairs.begin(), pairs.end(), [](const ScoredPair& a, const ScoredPair& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.parent != b.parent) return a.parent < b.parent;
    return a.child < b.child;
  });
  std::vector<std::array<int, 2>> out;
  std::vector<int> pu, cu;
  for (const ScoredPair& p : pairs) {
    if (std::count(pu.begin(), pu.end(), p.parent) || std::count(cu.begin(), cu.end(), p.child)) continue;
    pu.push_back(p.parent);
    cu.push_back(p.child);
    out.push_back({p.parent, p.child});
  }
  return out;
}

}  // namespace oracle

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "voxpaf/common.hpp"
#include "voxpaf/skeleton.hpp"

namespace voxpaf {

// Axis-aligned voxel cube embedded in world space. Voxel (0,0,0) occupies
// [origin, origin + voxel_size)^3; continuous grid coordinate g maps to the
// world point origin + (g + 0.5) * voxel_size (voxel-center convention), so
// integer grid coordinates are voxel centers.
struct VoxelGrid {
  Vec3 origin;                          // world coords of the minimal corner, meters
  std::array<int, 3> dims{64, 64, 32};  // voxels per axis
  double voxel_size = 0.075;            // meters

  void validate() const;
  std::int64_t voxel_count() const {
    return static_cast<std::int64_t>(dims[0]) * dims[1] * dims[2];
  }
  Vec3 center() const {
    return origin + Vec3{dims[0] * voxel_size, dims[1] * voxel_size, dims[2] * voxel_size} * 0.5;
  }
};

Vec3 grid_to_world(const VoxelGrid& grid, const Vec3& g);
Vec3 world_to_grid(const VoxelGrid& grid, const Point3& p);

// Sub-cube with the same voxel size placed uniformly at random inside the
// parent grid; the integer offset per axis is uniform in [0, dims - sub_dims].
VoxelGrid random_cube_embedding(const VoxelGrid& grid, const std::array<int, 3>& sub_dims, Rng& rng);

// Dense scalar field over a voxel grid. Storage order is x-major, then y,
// then z, then channel (channel fastest), matching the dump format.
struct Volume {
  VoxelGrid grid;
  int channels = 0;
  std::vector<std::string> channel_names;  // empty, or one per channel
  std::vector<float> data;

  Volume() = default;
  Volume(const VoxelGrid& g, int ch, std::vector<std::string> names = {});

  std::int64_t index(int x, int y, int z, int c) const {
    return ((static_cast<std::int64_t>(x) * grid.dims[1] + y) * grid.dims[2] + z) * channels + c;
  }
  float at(int x, int y, int z, int c) const { return data[index(x, y, z, c)]; }
  float& at(int x, int y, int z, int c) { return data[index(x, y, z, c)]; }
};

// Rotation about the vertical axis through the grid center by
// quarter_turns * 90 degrees, right-handed (CCW looking down -z).
// Scalar channels are permuted spatially; channels listed in
// vector_triple_bases are treated as the first index of an (x,y,z) vector
// triple whose horizontal components are rotated by the same angle.
// Odd quarter turns require a square x/y footprint.
Volume rotate_volume(const Volume& v, int quarter_turns, std::span<const int> vector_triple_bases = {});

// World-side counterpart of rotate_volume: rotates joint positions about the
// vertical axis through the grid center by the same angle.
std::vector<Skeleton> rotate_skeletons(const std::vector<Skeleton>& skeletons, const VoxelGrid& grid,
                                       int quarter_turns);

// Binary container: 16-byte magic ("VOXVOL01" padded with NUL), 4-byte
// little-endian JSON header length, UTF-8 JSON header, then raw
// little-endian float32 samples in storage order.
void save_volume(const Volume& v, const std::string& path);
Volume load_volume(const std::string& path);

namespace detail {
// Raw container framing shared by volume and feature-map dumps.
void write_container(const std::string& path, const std::string& header_json, std::span<const float> samples);
std::pair<std::string, std::vector<float>> read_container(const std::string& path);
}  // namespace detail

}  // namespace voxpaf

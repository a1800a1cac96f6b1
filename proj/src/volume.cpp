#include "voxpaf/volume.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace voxpaf {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr char kMagic[16] = {'V', 'O', 'X', 'V', 'O', 'L', '0', '1', 0, 0, 0, 0, 0, 0, 0, 0};

// Index permutation as a gather: the output voxel (x, y) reads from the
// returned input voxel. Turns are CCW about the vertical axis through the
// grid center; odd turns require qx == qy.
inline std::pair<int, int> gather_source(int x, int y, int qx, int qy, int quarter_turns) {
  switch (quarter_turns) {
    case 1: return {y, qx - 1 - x};
    case 2: return {qx - 1 - x, qy - 1 - y};
    default: return {qy - 1 - y, x};
  }
}

}  // namespace

void VoxelGrid::validate() const {
  if (dims[0] < 1 || dims[1] < 1 || dims[2] < 1)
    throw Error(ErrorCode::constraint, "voxel grid: dims components must be >= 1");
  if (!(voxel_size > 0.0)) throw Error(ErrorCode::constraint, "voxel grid: voxel_size must be positive");
  if (!origin.finite() || !std::isfinite(voxel_size))
    throw Error(ErrorCode::constraint, "voxel grid: non-finite parameters");
}

Vec3 grid_to_world(const VoxelGrid& grid, const Vec3& g) {
  return grid.origin + (g + Vec3{0.5, 0.5, 0.5}) * grid.voxel_size;
}

Vec3 world_to_grid(const VoxelGrid& grid, const Point3& p) {
  return (p - grid.origin) / grid.voxel_size - Vec3{0.5, 0.5, 0.5};
}

VoxelGrid random_cube_embedding(const VoxelGrid& grid, const std::array<int, 3>& sub_dims, Rng& rng) {
  grid.validate();
  for (int a = 0; a < 3; ++a) {
    if (sub_dims[a] < 1) throw Error(ErrorCode::invalid_argument, "random_cube_embedding: sub_dims must be >= 1");
    if (sub_dims[a] > grid.dims[a])
      throw Error(ErrorCode::invalid_argument, "random_cube_embedding: sub_dims exceed parent dims");
  }
  VoxelGrid sub = grid;
  sub.dims = sub_dims;
  for (int a = 0; a < 3; ++a) {
    auto offset = rng.uniform_int(0, grid.dims[a] - sub_dims[a]);
    switch (a) {
      case 0: sub.origin.x += static_cast<double>(offset) * grid.voxel_size; break;
      case 1: sub.origin.y += static_cast<double>(offset) * grid.voxel_size; break;
      case 2: sub.origin.z += static_cast<double>(offset) * grid.voxel_size; break;
    }
  }
  return sub;
}

Volume::Volume(const VoxelGrid& g, int ch, std::vector<std::string> names)
    : grid(g), channels(ch), channel_names(std::move(names)) {
  grid.validate();
  if (channels < 1) throw Error(ErrorCode::constraint, "volume: channel count must be >= 1");
  if (!channel_names.empty() && static_cast<int>(channel_names.size()) != channels)
    throw Error(ErrorCode::constraint, "volume: channel_names size must match channels");
  data.assign(static_cast<std::size_t>(grid.voxel_count()) * channels, 0.0f);
}

Volume rotate_volume(const Volume& v, int quarter_turns, std::span<const int> vector_triple_bases) {
  if (quarter_turns < 1 || quarter_turns > 3)
    throw Error(ErrorCode::invalid_argument, "rotate_volume: quarter_turns must be in {1,2,3}");
  const int qx = v.grid.dims[0], qy = v.grid.dims[1], qz = v.grid.dims[2];
  if ((quarter_turns % 2) == 1 && qx != qy)
    throw Error(ErrorCode::invalid_argument, "rotate_volume: odd quarter turns require a square x/y footprint");

  std::vector<bool> rotate_xy(static_cast<std::size_t>(v.channels), false);
  std::vector<bool> negate_from_y(static_cast<std::size_t>(v.channels), false);
  for (int base : vector_triple_bases) {
    if (base < 0 || base + 2 >= v.channels)
      throw Error(ErrorCode::invalid_argument, "rotate_volume: vector triple out of channel range");
    rotate_xy[base] = true;
  }

  Volume out(v.grid, v.channels, v.channel_names);
  const int c = v.channels;
  for (int x = 0; x < qx; ++x) {
    for (int y = 0; y < qy; ++y) {
      auto [sx, sy] = gather_source(x, y, qx, qy, quarter_turns);
      for (int z = 0; z < qz; ++z) {
        const float* src = &v.data[v.index(sx, sy, z, 0)];
        float* dst = &out.data[out.index(x, y, z, 0)];
        std::memcpy(dst, src, sizeof(float) * c);
        for (int base = 0; base < c; ++base) {
          if (!rotate_xy[base]) continue;
          double vx = src[base], vy = src[base + 1];
          // One CCW quarter turn maps (vx, vy) -> (-vy, vx); apply it quarter_turns times.
          for (int t = 0; t < quarter_turns; ++t) {
            double nvx = -vy, nvy = vx;
            vx = nvx;
            vy = nvy;
          }
          dst[base] = static_cast<float>(vx);
          dst[base + 1] = static_cast<float>(vy);
        }
      }
    }
  }
  return out;
}

std::vector<Skeleton> rotate_skeletons(const std::vector<Skeleton>& skeletons, const VoxelGrid& grid,
                                       int quarter_turns) {
  if (quarter_turns < 1 || quarter_turns > 3)
    throw Error(ErrorCode::invalid_argument, "rotate_skeletons: quarter_turns must be in {1,2,3}");
  const Vec3 pivot = grid.center();
  std::vector<Skeleton> out = skeletons;
  for (Skeleton& s : out) {
    for (auto& joint : s.joints) {
      if (!joint) continue;
      Vec3 rel = joint->position - pivot;
      // Exact quarter-turn rotations, no trigonometry.
      Vec3 rotated = rel;
      if (quarter_turns == 1) rotated = {-rel.y, rel.x, rel.z};
      if (quarter_turns == 2) rotated = {-rel.x, -rel.y, rel.z};
      if (quarter_turns == 3) rotated = {rel.y, -rel.x, rel.z};
      joint->position = pivot + rotated;
    }
  }
  return out;
}

namespace detail {

void write_container(const std::string& path, const std::string& header_json, std::span<const float> samples) {
  if (header_json.size() > 0xffffffffull) throw Error(ErrorCode::io, "dump: header too large");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "dump: cannot write " + path);
  out.write(kMagic, sizeof(kMagic));
  const std::uint32_t len = static_cast<std::uint32_t>(header_json.size());
  unsigned char len_le[4] = {static_cast<unsigned char>(len & 0xff), static_cast<unsigned char>((len >> 8) & 0xff),
                             static_cast<unsigned char>((len >> 16) & 0xff),
                             static_cast<unsigned char>((len >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(len_le), 4);
  out.write(header_json.data(), static_cast<std::streamsize>(header_json.size()));
  static_assert(std::endian::native == std::endian::little, "dump writer assumes little-endian host");
  out.write(reinterpret_cast<const char*>(samples.data()), static_cast<std::streamsize>(samples.size() * sizeof(float)));
  if (!out) throw Error(ErrorCode::io, "dump: write failed for " + path);
}

std::pair<std::string, std::vector<float>> read_container(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "dump: cannot open " + path);
  char magic[16];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw Error(ErrorCode::parse, "dump: bad magic in " + path);
  unsigned char len_le[4];
  in.read(reinterpret_cast<char*>(len_le), 4);
  if (!in) throw Error(ErrorCode::parse, "dump: truncated header length in " + path);
  const std::uint32_t len = static_cast<std::uint32_t>(len_le[0]) | (static_cast<std::uint32_t>(len_le[1]) << 8) |
                            (static_cast<std::uint32_t>(len_le[2]) << 16) |
                            (static_cast<std::uint32_t>(len_le[3]) << 24);
  std::string header_text(len, '\0');
  in.read(header_text.data(), len);
  if (!in) throw Error(ErrorCode::parse, "dump: truncated header in " + path);

  std::vector<float> samples;
  char chunk[1 << 16];
  while (in) {
    in.read(chunk, sizeof(chunk));
    std::streamsize got = in.gcount();
    if (got <= 0) break;
    if (got % sizeof(float) != 0) throw Error(ErrorCode::parse, "dump: sample bytes not float-aligned in " + path);
    std::size_t old = samples.size();
    samples.resize(old + static_cast<std::size_t>(got) / sizeof(float));
    std::memcpy(samples.data() + old, chunk, static_cast<std::size_t>(got));
  }
  return {std::move(header_text), std::move(samples)};
}

}  // namespace detail

void save_volume(const Volume& v, const std::string& path) {
  ordered_json header;
  header["origin"] = {v.grid.origin.x, v.grid.origin.y, v.grid.origin.z};
  header["dims"] = v.grid.dims;
  header["voxel_size"] = v.grid.voxel_size;
  header["channels"] = v.channels;
  header["channel_names"] = v.channel_names;
  detail::write_container(path, header.dump(), v.data);
}

Volume load_volume(const std::string& path) {
  auto [header_text, samples] = detail::read_container(path);
  VoxelGrid grid;
  int channels = 0;
  std::vector<std::string> names;
  try {
    ordered_json header = ordered_json::parse(header_text);
    const auto& o = header.at("origin");
    grid.origin = {o.at(0).get<double>(), o.at(1).get<double>(), o.at(2).get<double>()};
    const auto& d = header.at("dims");
    grid.dims = {d.at(0).get<int>(), d.at(1).get<int>(), d.at(2).get<int>()};
    grid.voxel_size = header.at("voxel_size").get<double>();
    channels = header.at("channels").get<int>();
    names = header.at("channel_names").get<std::vector<std::string>>();
  } catch (const std::exception& e) {
    throw Error(ErrorCode::parse, "volume dump: malformed header in " + path + ": " + e.what());
  }

  Volume v(grid, channels, std::move(names));
  if (samples.size() != v.data.size())
    throw Error(ErrorCode::parse, "volume dump: sample count does not match header in " + path);
  v.data = std::move(samples);
  return v;
}

}  // namespace voxpaf

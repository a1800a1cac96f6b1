#include "voxpaf/targets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <sstream>

#include <json.hpp>

namespace voxpaf {

namespace {

using ordered_json = nlohmann::ordered_json;

// Beyond this many sigmas the Gaussian rounds to zero in float storage, so
// evaluation can be restricted to a bounding box without changing the output.
constexpr double kGaussianCutoffSigmas = 14.6;

std::string read_text_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, std::string(what) + ": cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text, const char* what) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, std::string(what) + ": cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::io, std::string(what) + ": write failed for " + path);
}

struct GridBox {
  int lo[3];
  int hi[3];  // inclusive
  bool empty = false;
};

GridBox clip_box(const VoxelGrid& grid, const Vec3& lo_g, const Vec3& hi_g) {
  GridBox box;
  const double lo_in[3] = {lo_g.x, lo_g.y, lo_g.z};
  const double hi_in[3] = {hi_g.x, hi_g.y, hi_g.z};
  for (int a = 0; a < 3; ++a) {
    box.lo[a] = std::max(0, static_cast<int>(std::floor(lo_in[a])));
    box.hi[a] = std::min(grid.dims[a] - 1, static_cast<int>(std::ceil(hi_in[a])));
    if (box.lo[a] > box.hi[a]) box.empty = true;
  }
  return box;
}

double element_loss(double d, LossKind kind) {
  switch (kind) {
    case LossKind::L1: return std::abs(d);
    case LossKind::L2: return d * d;
    case LossKind::SmoothL1: return std::abs(d) < 1.0 ? 0.5 * d * d : std::abs(d) - 0.5;
  }
  return 0.0;
}

double mean_element_loss(const Volume& pred, const Volume& gt, LossKind kind) {
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.data.size(); ++i)
    sum += element_loss(static_cast<double>(pred.data[i]) - static_cast<double>(gt.data[i]), kind);
  return sum / static_cast<double>(pred.data.size());
}

void require_same_shape(const Volume& a, const Volume& b, const char* what) {
  if (a.grid.dims != b.grid.dims || a.channels != b.channels)
    throw Error(ErrorCode::invalid_argument, std::string("loss: ") + what + " shapes do not match");
}

}  // namespace

int PoseLayout::index_of(const std::string& name) const {
  for (int i = 0; i < joint_count(); ++i)
    if (joint_names[i] == name) return i;
  return -1;
}

void PoseLayout::validate() const {
  const int n = joint_count();
  if (n < 1) throw Error(ErrorCode::constraint, "pose layout: no joints");
  const int neck = index_of("neck");
  if (neck < 0) throw Error(ErrorCode::constraint, "pose layout: missing root joint \"neck\"");

  std::vector<int> parent_of(static_cast<std::size_t>(n), -1);
  for (const auto& [a, b] : paf_edges) {
    if (a < 0 || a >= n || b < 0 || b >= n)
      throw Error(ErrorCode::constraint, "pose layout: edge index out of range");
    if (a == b) throw Error(ErrorCode::constraint, "pose layout: self-loop edge");
    if (b == neck) throw Error(ErrorCode::constraint, "pose layout: root joint cannot be a child");
    if (parent_of[b] != -1) throw Error(ErrorCode::constraint, "pose layout: joint has two parents");
    parent_of[b] = a;
  }

  // Every edge must hang off the root through other edges, otherwise the
  // edge set contains a cycle or a disconnected component.
  std::vector<std::vector<int>> children(static_cast<std::size_t>(n));
  for (std::size_t e = 0; e < paf_edges.size(); ++e) children[paf_edges[e].first].push_back(static_cast<int>(e));
  std::vector<bool> edge_seen(paf_edges.size(), false);
  std::queue<int> frontier;
  frontier.push(neck);
  while (!frontier.empty()) {
    int j = frontier.front();
    frontier.pop();
    for (int e : children[j]) {
      if (edge_seen[e]) continue;
      edge_seen[e] = true;
      frontier.push(paf_edges[e].second);
    }
  }
  if (!std::all_of(edge_seen.begin(), edge_seen.end(), [](bool b) { return b; }))
    throw Error(ErrorCode::constraint, "pose layout: edges do not form a tree rooted at the neck");
}

PoseLayout PoseLayout::cmu14() {
  PoseLayout layout;
  layout.joint_names = {"neck",    "nose",    "l_shoulder", "r_shoulder", "l_elbow", "r_elbow", "l_wrist",
                        "r_wrist", "l_hip",   "r_hip",      "l_knee",     "r_knee",  "l_ankle", "r_ankle"};
  layout.paf_edges = {{0, 1}, {0, 2}, {0, 3}, {2, 4},  {3, 5},  {4, 6},   {5, 7},
                      {0, 8}, {0, 9}, {8, 10}, {9, 11}, {10, 12}, {11, 13}};
  return layout;
}

PoseLayout load_layout(const std::string& path) {
  const std::string text = read_text_file(path, "layout");
  PoseLayout layout;
  try {
    ordered_json doc = ordered_json::parse(text);
    layout.joint_names = doc.at("joints").get<std::vector<std::string>>();
    for (const auto& pair : doc.at("pafs")) {
      if (pair.size() != 2) throw std::runtime_error("paf entry must have 2 indices");
      layout.paf_edges.emplace_back(pair.at(0).get<int>(), pair.at(1).get<int>());
    }
  } catch (const std::exception& e) {
    throw Error(ErrorCode::parse, "layout: malformed JSON in " + path + ": " + e.what());
  }
  layout.validate();
  return layout;
}

void save_layout(const PoseLayout& layout, const std::string& path) {
  ordered_json doc;
  doc["joints"] = layout.joint_names;
  ordered_json pafs = ordered_json::array();
  for (const auto& [a, b] : layout.paf_edges) pafs.push_back({a, b});
  doc["pafs"] = pafs;
  write_text_file(path, doc.dump(2) + "\n", "layout");
}

std::vector<Skeleton> parse_skeletons(const std::string& json_text, const PoseLayout& layout) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::parse, std::string("skeletons: invalid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::parse, "skeletons: top-level value must be an array");

  std::vector<Skeleton> skeletons;
  skeletons.reserve(doc.size());
  for (const auto& entry : doc) {
    Skeleton s;
    s.joints.assign(static_cast<std::size_t>(layout.joint_count()), std::nullopt);
    const auto& joints = entry.at("joints");
    for (auto it = joints.begin(); it != joints.end(); ++it) {
      const int idx = layout.index_of(it.key());
      if (idx < 0) throw Error(ErrorCode::parse, "skeletons: unknown joint name \"" + it.key() + "\"");
      if (it.value().is_null()) continue;
      if (it.value().size() != 3) throw Error(ErrorCode::parse, "skeletons: joint \"" + it.key() + "\" needs 3 coords");
      Joint j;
      j.position = {it.value().at(0).get<double>(), it.value().at(1).get<double>(), it.value().at(2).get<double>()};
      if (!j.position.finite())
        throw Error(ErrorCode::constraint, "skeletons: joint \"" + it.key() + "\" has non-finite coordinates");
      s.joints[static_cast<std::size_t>(idx)] = j;
    }
    if (entry.contains("confidences")) {
      const auto& conf = entry.at("confidences");
      for (auto it = conf.begin(); it != conf.end(); ++it) {
        const int idx = layout.index_of(it.key());
        if (idx < 0) throw Error(ErrorCode::parse, "skeletons: unknown joint name \"" + it.key() + "\"");
        const double c = it.value().get<double>();
        if (!(c >= 0.0 && c <= 1.0))
          throw Error(ErrorCode::constraint, "skeletons: confidence for \"" + it.key() + "\" outside [0,1]");
        if (s.joints[static_cast<std::size_t>(idx)]) s.joints[static_cast<std::size_t>(idx)]->confidence = c;
      }
    }
    skeletons.push_back(std::move(s));
  }
  return skeletons;
}

std::vector<Skeleton> load_skeletons(const std::string& path, const PoseLayout& layout) {
  return parse_skeletons(read_text_file(path, "skeletons"), layout);
}

std::string skeletons_to_json(const std::vector<Skeleton>& skeletons, const PoseLayout& layout) {
  ordered_json doc = ordered_json::array();
  for (const Skeleton& s : skeletons) {
    if (static_cast<int>(s.joints.size()) != layout.joint_count())
      throw Error(ErrorCode::invalid_argument, "skeletons: joint count does not match layout");
    ordered_json joints;
    ordered_json confidences;
    for (int i = 0; i < layout.joint_count(); ++i) {
      const auto& j = s.joints[static_cast<std::size_t>(i)];
      if (j) {
        joints[layout.joint_names[i]] = {j->position.x, j->position.y, j->position.z};
        confidences[layout.joint_names[i]] = j->confidence;
      } else {
        joints[layout.joint_names[i]] = nullptr;
      }
    }
    ordered_json entry;
    entry["joints"] = std::move(joints);
    entry["confidences"] = std::move(confidences);
    doc.push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

void save_skeletons(const std::vector<Skeleton>& skeletons, const PoseLayout& layout, const std::string& path) {
  write_text_file(path, skeletons_to_json(skeletons, layout), "skeletons");
}

Volume render_heatmaps(const std::vector<Skeleton>& skeletons, const VoxelGrid& grid, double sigma_voxels,
                       const PoseLayout& layout) {
  if (!(sigma_voxels > 0.0)) throw Error(ErrorCode::invalid_argument, "render_heatmaps: sigma must be positive");
  Volume out(grid, layout.joint_count(), layout.joint_names);
  const double sigma_m = sigma_voxels * grid.voxel_size;
  const double inv_two_sigma_sq = 1.0 / (2.0 * sigma_m * sigma_m);
  const double cutoff_voxels = kGaussianCutoffSigmas * sigma_voxels + 1.0;

  for (const Skeleton& s : skeletons) {
    if (static_cast<int>(s.joints.size()) != layout.joint_count())
      throw Error(ErrorCode::invalid_argument, "render_heatmaps: joint count does not match layout");
    for (int l = 0; l < layout.joint_count(); ++l) {
      const auto& joint = s.joints[static_cast<std::size_t>(l)];
      if (!joint) continue;
      const Vec3 g = world_to_grid(grid, joint->position);
      const Vec3 r{cutoff_voxels, cutoff_voxels, cutoff_voxels};
      const GridBox box = clip_box(grid, g - r, g + r);
      if (box.empty) continue;
      for (int x = box.lo[0]; x <= box.hi[0]; ++x) {
        for (int y = box.lo[1]; y <= box.hi[1]; ++y) {
          for (int z = box.lo[2]; z <= box.hi[2]; ++z) {
            const Vec3 w = grid_to_world(grid, Vec3{static_cast<double>(x), static_cast<double>(y), static_cast<double>(z)});
            const Vec3 d = w - joint->position;
            const float val = static_cast<float>(std::exp(-d.dot(d) * inv_two_sigma_sq));
            float& cell = out.at(x, y, z, l);
            cell = std::max(cell, val);
          }
        }
      }
    }
  }
  return out;
}

Volume render_vectormaps(const std::vector<Skeleton>& skeletons, const VoxelGrid& grid, const PoseLayout& layout,
                         double limb_radius_voxels) {
  if (!(limb_radius_voxels > 0.0))
    throw Error(ErrorCode::invalid_argument, "render_vectormaps: limb radius must be positive");
  layout.validate();
  Volume out(grid, 3 * layout.paf_count());
  const double radius_m = limb_radius_voxels * grid.voxel_size;
  std::vector<std::uint16_t> counts(static_cast<std::size_t>(grid.voxel_count()));

  for (int e = 0; e < layout.paf_count(); ++e) {
    std::fill(counts.begin(), counts.end(), 0);
    const auto [parent, child] = layout.paf_edges[static_cast<std::size_t>(e)];
    for (const Skeleton& s : skeletons) {
      if (static_cast<int>(s.joints.size()) != layout.joint_count())
        throw Error(ErrorCode::invalid_argument, "render_vectormaps: joint count does not match layout");
      const auto& pj = s.joints[static_cast<std::size_t>(parent)];
      const auto& cj = s.joints[static_cast<std::size_t>(child)];
      if (!pj || !cj) continue;
      const Vec3 pa = pj->position;
      const Vec3 pb = cj->position;
      const Vec3 axis = pb - pa;
      const double length = axis.norm();
      if (length == 0.0) continue;  // degenerate limb has no direction
      const Vec3 u = axis / length;

      const Vec3 ga = world_to_grid(grid, pa);
      const Vec3 gb = world_to_grid(grid, pb);
      const double pad = limb_radius_voxels + 1.0;
      const Vec3 lo{std::min(ga.x, gb.x) - pad, std::min(ga.y, gb.y) - pad, std::min(ga.z, gb.z) - pad};
      const Vec3 hi{std::max(ga.x, gb.x) + pad, std::max(ga.y, gb.y) + pad, std::max(ga.z, gb.z) + pad};
      const GridBox box = clip_box(grid, lo, hi);
      if (box.empty) continue;

      for (int x = box.lo[0]; x <= box.hi[0]; ++x) {
        for (int y = box.lo[1]; y <= box.hi[1]; ++y) {
          for (int z = box.lo[2]; z <= box.hi[2]; ++z) {
            const Vec3 w = grid_to_world(grid, Vec3{static_cast<double>(x), static_cast<double>(y), static_cast<double>(z)});
            const Vec3 rel = w - pa;
            const double t = rel.dot(u);
            if (t < 0.0 || t > length) continue;
            const Vec3 perp = rel - u * t;
            if (perp.norm() > radius_m) continue;
            const std::size_t vi = static_cast<std::size_t>((static_cast<std::int64_t>(x) * grid.dims[1] + y) * grid.dims[2] + z);
            out.at(x, y, z, 3 * e + 0) += static_cast<float>(u.x);
            out.at(x, y, z, 3 * e + 1) += static_cast<float>(u.y);
            out.at(x, y, z, 3 * e + 2) += static_cast<float>(u.z);
            counts[vi] += 1;
          }
        }
      }
    }

    // Average overlapping contributions.
    for (int x = 0; x < grid.dims[0]; ++x)
      for (int y = 0; y < grid.dims[1]; ++y)
        for (int z = 0; z < grid.dims[2]; ++z) {
          const std::size_t vi = static_cast<std::size_t>((static_cast<std::int64_t>(x) * grid.dims[1] + y) * grid.dims[2] + z);
          if (counts[vi] < 2) continue;
          const float inv = 1.0f / static_cast<float>(counts[vi]);
          for (int c = 0; c < 3; ++c) out.at(x, y, z, 3 * e + c) *= inv;
        }
  }
  return out;
}

LossValue loss(const VolumetricOutput& pred, const VolumetricOutput& gt, LossKind kind, double hm_weight,
               double vm_weight) {
  require_same_shape(pred.heatmaps, gt.heatmaps, "heatmap");
  require_same_shape(pred.vectormaps, gt.vectormaps, "vectormap");
  if (hm_weight < 0.0 || vm_weight < 0.0) throw Error(ErrorCode::invalid_argument, "loss: weights must be >= 0");
  LossValue v;
  v.heatmap_part = mean_element_loss(pred.heatmaps, gt.heatmaps, kind);
  v.vectormap_part = mean_element_loss(pred.vectormaps, gt.vectormaps, kind);
  v.total = hm_weight * v.heatmap_part + vm_weight * v.vectormap_part;
  return v;
}

}  // namespace voxpaf

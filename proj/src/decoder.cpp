#include "voxpaf/decoder.hpp"

#include <algorithm>
#include <cmath>

namespace voxpaf {

namespace {

// Trilinear sample of one vectormap triple at a continuous grid position.
// Lattice points outside the grid contribute zero.
Vec3 sample_triple(const Volume& v, const Vec3& pos, int base_channel) {
  const int fx = static_cast<int>(std::floor(pos.x));
  const int fy = static_cast<int>(std::floor(pos.y));
  const int fz = static_cast<int>(std::floor(pos.z));
  const double ax = pos.x - fx, ay = pos.y - fy, az = pos.z - fz;
  const auto& dims = v.grid.dims;

  Vec3 out{0.0, 0.0, 0.0};
  for (int dx = 0; dx <= 1; ++dx)
    for (int dy = 0; dy <= 1; ++dy)
      for (int dz = 0; dz <= 1; ++dz) {
        const int x = fx + dx, y = fy + dy, z = fz + dz;
        if (x < 0 || x >= dims[0] || y < 0 || y >= dims[1] || z < 0 || z >= dims[2]) continue;
        const double w = (dx ? ax : 1.0 - ax) * (dy ? ay : 1.0 - ay) * (dz ? az : 1.0 - az);
        if (w == 0.0) continue;
        out.x += w * v.at(x, y, z, base_channel + 0);
        out.y += w * v.at(x, y, z, base_channel + 1);
        out.z += w * v.at(x, y, z, base_channel + 2);
      }
  return out;
}

void check_edge(const Volume& vectormaps, int edge, const char* what) {
  if (vectormaps.channels % 3 != 0)
    throw Error(ErrorCode::invalid_argument, std::string(what) + ": vectormap channels not a multiple of 3");
  if (edge < 0 || 3 * edge >= vectormaps.channels)
    throw Error(ErrorCode::invalid_argument, std::string(what) + ": edge out of range");
}

struct Candidate {
  double score;
  int parent;
  int child;
};

// Partial skeleton during assembly: per joint, an index into that joint's
// peak list, or -1 when unresolved.
struct Hypothesis {
  std::vector<int> peak_of;
};

}  // namespace

double paf_score(const Volume& vectormaps, int edge, const Vec3& from, const Vec3& to, int n_samples) {
  check_edge(vectormaps, edge, "paf_score");
  if (n_samples < 2) throw Error(ErrorCode::invalid_argument, "paf_score: need at least 2 samples");
  const Vec3 d = to - from;
  const double len = d.norm();
  if (len == 0.0) return 0.0;  // zero-length candidate has no direction to agree with
  const Vec3 unit = d / len;

  double sum = 0.0;
  for (int k = 0; k < n_samples; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n_samples - 1);
    const Vec3 sample = sample_triple(vectormaps, from + d * t, 3 * edge);
    sum += sample.dot(unit);
  }
  return sum / static_cast<double>(n_samples);
}

std::vector<LimbMatch> match_limb(const Volume& vectormaps, int edge, const std::vector<Peak>& parents,
                                  const std::vector<Peak>& children, int n_samples, double threshold) {
  std::vector<Candidate> candidates;
  candidates.reserve(parents.size() * children.size());
  for (int i = 0; i < static_cast<int>(parents.size()); ++i)
    for (int j = 0; j < static_cast<int>(children.size()); ++j) {
      const double s = paf_score(vectormaps, edge, parents[i].position, children[j].position, n_samples);
      if (s >= threshold) candidates.push_back({s, i, j});
    }

  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.parent != b.parent) return a.parent < b.parent;
    return a.child < b.child;
  });

  std::vector<char> parent_used(parents.size(), 0), child_used(children.size(), 0);
  std::vector<LimbMatch> matches;
  for (const Candidate& c : candidates) {
    if (parent_used[c.parent] || child_used[c.child]) continue;
    parent_used[c.parent] = 1;
    child_used[c.child] = 1;
    matches.push_back({c.parent, c.child, c.score});
  }
  return matches;
}

std::vector<Skeleton> assemble(const std::vector<std::vector<Peak>>& peaks, const Volume& vectormaps,
                               const PoseLayout& layout, const DecoderParams& params) {
  layout.validate();
  if (static_cast<int>(peaks.size()) != layout.joint_count())
    throw Error(ErrorCode::invalid_argument, "assemble: peak channel count does not match layout");
  if (vectormaps.channels != 3 * layout.paf_count())
    throw Error(ErrorCode::invalid_argument, "assemble: vectormap channel count does not match layout");

  std::vector<Hypothesis> hypotheses;
  for (int e = 0; e < layout.paf_count(); ++e) {
    const auto [a, b] = layout.paf_edges[static_cast<std::size_t>(e)];
    const std::vector<LimbMatch> matches = match_limb(vectormaps, e, peaks[static_cast<std::size_t>(a)],
                                                      peaks[static_cast<std::size_t>(b)], params.paf_samples,
                                                      params.paf_threshold);
    for (const LimbMatch& m : matches) {
      Hypothesis* host = nullptr;
      for (Hypothesis& h : hypotheses)
        if (h.peak_of[static_cast<std::size_t>(a)] == m.parent) {
          host = &h;
          break;
        }
      if (!host) {
        hypotheses.push_back({std::vector<int>(static_cast<std::size_t>(layout.joint_count()), -1)});
        host = &hypotheses.back();
        host->peak_of[static_cast<std::size_t>(a)] = m.parent;
      }
      host->peak_of[static_cast<std::size_t>(b)] = m.child;
    }
  }

  std::vector<Skeleton> skeletons;
  for (const Hypothesis& h : hypotheses) {
    int resolved = 0;
    for (int idx : h.peak_of)
      if (idx >= 0) ++resolved;
    if (resolved < params.min_joints) continue;
    Skeleton s;
    s.joints.assign(static_cast<std::size_t>(layout.joint_count()), std::nullopt);
    for (int j = 0; j < layout.joint_count(); ++j) {
      const int idx = h.peak_of[static_cast<std::size_t>(j)];
      if (idx < 0) continue;
      const Peak& p = peaks[static_cast<std::size_t>(j)][static_cast<std::size_t>(idx)];
      Joint joint;
      joint.position = grid_to_world(vectormaps.grid, p.position);
      joint.confidence = std::clamp(p.score, 0.0, 1.0);
      s.joints[static_cast<std::size_t>(j)] = joint;
    }
    skeletons.push_back(std::move(s));
  }
  return skeletons;
}

std::vector<Skeleton> decode(const Volume& heatmaps, const Volume& vectormaps, const PoseLayout& layout,
                             const DecoderParams& params) {
  if (heatmaps.channels != layout.joint_count())
    throw Error(ErrorCode::invalid_argument, "decode: heatmap channel count does not match layout");
  if (heatmaps.grid.dims != vectormaps.grid.dims || heatmaps.grid.voxel_size != vectormaps.grid.voxel_size ||
      heatmaps.grid.origin.x != vectormaps.grid.origin.x || heatmaps.grid.origin.y != vectormaps.grid.origin.y ||
      heatmaps.grid.origin.z != vectormaps.grid.origin.z)
    throw Error(ErrorCode::invalid_argument, "decode: heatmap and vectormap grids differ");
  const std::vector<std::vector<Peak>> peaks = detect_peaks(heatmaps, params.peaks);
  return assemble(peaks, vectormaps, layout, params);
}

}  // namespace voxpaf

#pragma once

#include <vector>

#include "voxpaf/peaks.hpp"
#include "voxpaf/skeleton.hpp"
#include "voxpaf/targets.hpp"

namespace voxpaf {

struct DecoderParams {
  PeakParams peaks;
  int paf_samples = 10;        // points sampled along each candidate limb, endpoints included
  double paf_threshold = 0.2;  // minimum line-integral score for a limb to connect
  int min_joints = 8;          // skeletons with fewer resolved joints are dropped
};

// Mean projection of the vectormap onto the candidate limb direction,
// sampled at `n_samples` evenly spaced points from `from` to `to`
// (grid coordinates, endpoints included) with trilinear interpolation.
double paf_score(const Volume& vectormaps, int edge, const Vec3& from, const Vec3& to, int n_samples);

// One resolved limb connection between a parent-channel peak and a
// child-channel peak, by index into the respective peak lists.
struct LimbMatch {
  int parent = -1;
  int child = -1;
  double score = 0.0;
};

// Greedy bipartite matching of parent peaks to child peaks by descending
// limb score. Candidates below `threshold` never connect; each peak is used
// at most once. Equal scores resolve in ascending (parent, child) order.
std::vector<LimbMatch> match_limb(const Volume& vectormaps, int edge, const std::vector<Peak>& parents,
                                  const std::vector<Peak>& children, int n_samples, double threshold);

// Full decode: peak detection on every heatmap channel, limb matching along
// every vectormap edge in layout order, and assembly of the matched limbs
// into skeletons. Joint positions are mapped back to world coordinates;
// joint confidence is the peak's heatmap score. Skeletons with fewer than
// `min_joints` resolved joints are discarded.
std::vector<Skeleton> decode(const Volume& heatmaps, const Volume& vectormaps, const PoseLayout& layout,
                             const DecoderParams& params);

// Assembly stage alone, exposed for tests: takes per-channel peaks (grid
// coordinates) and connects them into skeletons.
std::vector<Skeleton> assemble(const std::vector<std::vector<Peak>>& peaks, const Volume& vectormaps,
                               const PoseLayout& layout, const DecoderParams& params);

}  // namespace voxpaf

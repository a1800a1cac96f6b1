#pragma once

#include <array>
#include <vector>

#include "voxpaf/volume.hpp"

namespace voxpaf {

// A detected local maximum in one heatmap channel. `position` is in grid
// coordinates (continuous voxel indices) after sub-voxel refinement;
// `score` is the heatmap value at the integer peak voxel.
struct Peak {
  Vec3 position;
  double score = 0.0;
};

struct PeakParams {
  int radius = 2;          // neighborhood half-extent per axis, clipped at the borders
  double threshold = 0.3;  // minimum heatmap value for a voxel to qualify as a peak
  bool refine = true;      // mass-weighted centroid refinement around each peak
};

// Finds all voxels of channel `channel` whose value is maximal over the
// (2*radius+1)^3 neighborhood and at least `threshold`. A flat plateau
// yields exactly one peak: the voxel with the smallest (x, y, z) index in
// lexicographic order. Peaks are returned sorted by descending score, ties
// in ascending index order; positions are integer voxel centers.
std::vector<Peak> find_peaks(const Volume& heatmaps, int channel, const PeakParams& params);

// Replaces a peak's integer position with the mass-weighted centroid of the
// heatmap over the clipped neighborhood around it. Throws a constraint error
// when the neighborhood carries no positive mass.
Vec3 refine_subvoxel(const Volume& heatmaps, int channel, const std::array<int, 3>& voxel, int radius);

// find_peaks + optional refinement, for every channel. Result is indexed by
// channel.
std::vector<std::vector<Peak>> detect_peaks(const Volume& heatmaps, const PeakParams& params);

}  // namespace voxpaf

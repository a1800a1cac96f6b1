#pragma once

#include <string>
#include <vector>

#include "voxpaf/skeleton.hpp"
#include "voxpaf/targets.hpp"

namespace voxpaf {

// Cost placed on assignment pairs that must never match. Any pair whose
// solved cost reaches this magnitude is reported as unmatched.
constexpr double kUnassignable = 1e30;

// Minimum-cost one-to-one assignment on a dense rows x cols matrix.
// Returns the assigned column per row, -1 where a row stays unassigned.
// Because kUnassignable dwarfs any sum of real costs, the solver first
// maximizes the number of real matches, then minimizes their total cost.
std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost);

struct SkeletonMatch {
  int gt = -1;
  int pred = -1;
  double mean_distance_m = 0.0;  // mean joint distance over shared joints
  int shared_joints = 0;
};

// Optimal pairing of ground-truth and predicted skeletons minimizing the
// mean distance over jointly present joints. Pairs without any shared
// joint never match.
std::vector<SkeletonMatch> match_skeletons(const std::vector<Skeleton>& gt, const std::vector<Skeleton>& pred);

// Mean per-joint position error in centimeters over all shared joints of
// all matched pairs. Throws a constraint error when no joints matched.
double mpjpe_cm(const std::vector<Skeleton>& gt, const std::vector<Skeleton>& pred,
                const std::vector<SkeletonMatch>& matches);

struct PcpGroup {
  std::string name;
  int correct = 0;
  int total = 0;
  double percent() const { return total > 0 ? 100.0 * correct / total : 0.0; }
};

struct PcpResult {
  std::vector<PcpGroup> groups;
  double average = 0.0;  // mean over groups with at least one scored limb
};

// Percentage of correct parts: a limb counts as correct when the mean of
// its two endpoint errors stays below half the true limb length. Limbs of
// unmatched ground-truth skeletons and limbs with a missing predicted
// endpoint count as incorrect; limbs without a usable ground-truth length
// are skipped.
PcpResult pcp(const std::vector<Skeleton>& gt, const std::vector<Skeleton>& pred,
              const std::vector<SkeletonMatch>& matches, const PoseLayout& layout);

struct EvalReport {
  double mpjpe_cm = 0.0;  // NaN when no joints matched
  PcpResult pcp;
  int matched_pairs = 0;
  int unmatched_predictions = 0;
  int unmatched_groundtruths = 0;
};

EvalReport evaluate(const std::vector<Skeleton>& gt, const std::vector<Skeleton>& pred, const PoseLayout& layout);

std::string report_to_json(const EvalReport& report);
std::string report_to_table(const EvalReport& report);

}  // namespace voxpaf

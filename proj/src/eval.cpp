#include "voxpaf/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace voxpaf {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kInf = std::numeric_limits<double>::infinity();

int require_uniform_joint_count(const std::vector<Skeleton>& gt, const std::vector<Skeleton>& pred) {
  int count = -1;
  for (const auto* set : {&gt, &pred})
    for (const Skeleton& s : *set) {
      if (count == -1) count = static_cast<int>(s.joints.size());
      if (static_cast<int>(s.joints.size()) != count)
        throw Error(ErrorCode::invalid_argument, "evaluate: skeletons have differing joint counts");
    }
  return count;
}

// Limbs scored per group; neck-to-shoulder stays unscored by convention.
struct LimbSpec {
  const char* parent;
  const char* child;
};

struct GroupSpec {
  const char* name;
  std::vector<LimbSpec> limbs;
};

const std::vector<GroupSpec>& pcp_groups() {
  static const std::vector<GroupSpec> groups = {
      {"Head", {{"neck", "nose"}}},
      {"Torso", {{"neck", "l_hip"}, {"neck", "r_hip"}}},
      {"Upper Arm", {{"l_shoulder", "l_elbow"}, {"r_shoulder", "r_elbow"}}},
      {"Lower Arm", {{"l_elbow", "l_wrist"}, {"r_elbow", "r_wrist"}}},
      {"Upper Leg", {{"l_hip", "l_knee"}, {"r_hip", "r_knee"}}},
      {"Lower Leg", {{"l_knee", "l_ankle"}, {"r_knee", "r_ankle"}}},
  };
  return groups;
}

}  // namespace

std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  std::vector<int> result(static_cast<std::size_t>(n), -1);
  if (n == 0) return result;
  const int m = static_cast<int>(cost[0].size());
  for (const auto& row : cost)
    if (static_cast<int>(row.size()) != m)
      throw Error(ErrorCode::invalid_argument, "solve_assignment: ragged cost matrix");
  if (m == 0) return result;

  // Potential-based shortest augmenting paths; needs rows <= cols, so work
  // on the transpose when the matrix is taller than wide.
  const bool transposed = n > m;
  const int rows = transposed ? m : n;
  const int cols = transposed ? n : m;
  const auto at = [&](int i, int j) { return transposed ? cost[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]
                                                        : cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; };

  std::vector<double> u(static_cast<std::size_t>(rows) + 1, 0.0), v(static_cast<std::size_t>(cols) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(cols) + 1, 0), way(static_cast<std::size_t>(cols) + 1, 0);
  for (int i = 1; i <= rows; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(cols) + 1, kInf);
    std::vector<char> used(static_cast<std::size_t>(cols) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= cols; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = at(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= cols; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  for (int j = 1; j <= cols; ++j) {
    const int i = p[static_cast<std::size_t>(j)];
    if (i == 0) continue;
    if (transposed)
      result[static_cast<std::size_t>(j - 1)] = i - 1;
    else
      result[static_cast<std::size_t>(i - 1)] = j - 1;
  }
  return result;
}

std::vector<SkeletonMatch> match_skeletons(const std::vector<Skeleton>& gt, const std::vector<Skeleton>& pred) {
  require_uniform_joint_count(gt, pred);
  if (gt.empty() || pred.empty()) return {};

  std::vector<std::vector<double>> cost(gt.size(), std::vector<double>(pred.size(), kUnassignable));
  std::vector<std::vector<int>> shared(gt.size(), std::vector<int>(pred.size(), 0));
  for (std::size_t gi = 0; gi < gt.size(); ++gi)
    for (std::size_t pi = 0; pi < pred.size(); ++pi) {
      double sum = 0.0;
      int count = 0;
      for (std::size_t j = 0; j < gt[gi].joints.size(); ++j) {
        const auto& a = gt[gi].joints[j];
        const auto& b = pred[pi].joints[j];
        if (!a || !b) continue;
        sum += (a->position - b->position).norm();
        ++count;
      }
      if (count > 0) {
        cost[gi][pi] = sum / count;
        shared[gi][pi] = count;
      }
    }

  const std::vector<int> assigned = solve_assignment(cost);
  std::vector<SkeletonMatch> matches;
  for (std::size_t gi = 0; gi < gt.size(); ++gi) {
    const int pi = assigned[gi];
    if (pi < 0 || cost[gi][static_cast<std::size_t>(pi)] >= 0.5 * kUnassignable) continue;
    matches.push_back({static_cast<int>(gi), pi, cost[gi][static_cast<std::size_t>(pi)],
                       shared[gi][static_cast<std::size_t>(pi)]});
  }
  return matches;
}

double mpjpe_cm(const std::vector<Skeleton>& gt, const std::vector<Skeleton>& pred,
                const std::vector<SkeletonMatch>& matches) {
  double sum = 0.0;
  long count = 0;
  for (const SkeletonMatch& m : matches) {
    const Skeleton& g = gt.at(static_cast<std::size_t>(m.gt));
    const Skeleton& p = pred.at(static_cast<std::size_t>(m.pred));
    for (std::size_t j = 0; j < g.joints.size(); ++j) {
      if (!g.joints[j] || !p.joints[j]) continue;
      sum += (g.joints[j]->position - p.joints[j]->position).norm();
      ++count;
    }
  }
  if (count == 0) throw Error(ErrorCode::constraint, "mpjpe: no jointly present joints among the matches");
  return 100.0 * sum / static_cast<double>(count);
}

PcpResult pcp(const std::vector<Skeleton>& gt, const std::vector<Skeleton>& pred,
              const std::vector<SkeletonMatch>& matches, const PoseLayout& layout) {
  std::vector<int> pred_of(gt.size(), -1);
  for (const SkeletonMatch& m : matches) pred_of.at(static_cast<std::size_t>(m.gt)) = m.pred;

  PcpResult result;
  for (const GroupSpec& spec : pcp_groups()) {
    PcpGroup group;
    group.name = spec.name;
    for (const LimbSpec& limb : spec.limbs) {
      const int a = layout.index_of(limb.parent);
      const int b = layout.index_of(limb.child);
      if (a < 0 || b < 0) continue;
      for (std::size_t gi = 0; gi < gt.size(); ++gi) {
        const auto& ga = gt[gi].joints[static_cast<std::size_t>(a)];
        const auto& gb = gt[gi].joints[static_cast<std::size_t>(b)];
        if (!ga || !gb) continue;
        const double limb_len = (ga->position - gb->position).norm();
        if (limb_len == 0.0) continue;  // no usable reference length
        group.total += 1;
        const int pi = pred_of[gi];
        if (pi < 0) continue;  // unmatched skeleton: limb stays incorrect
        const auto& pa = pred[static_cast<std::size_t>(pi)].joints[static_cast<std::size_t>(a)];
        const auto& pb = pred[static_cast<std::size_t>(pi)].joints[static_cast<std::size_t>(b)];
        if (!pa || !pb) continue;  // missing endpoint: incorrect
        const double err = 0.5 * ((pa->position - ga->position).norm() + (pb->position - gb->position).norm());
        if (err < 0.5 * limb_len) group.correct += 1;
      }
    }
    result.groups.push_back(std::move(group));
  }

  double sum = 0.0;
  int nonempty = 0;
  for (const PcpGroup& g : result.groups)
    if (g.total > 0) {
      sum += g.percent();
      ++nonempty;
    }
  result.average = nonempty > 0 ? sum / nonempty : 0.0;
  return result;
}

EvalReport evaluate(const std::vector<Skeleton>& gt, const std::vector<Skeleton>& pred, const PoseLayout& layout) {
  const int joints = require_uniform_joint_count(gt, pred);
  if (joints != -1 && joints != layout.joint_count())
    throw Error(ErrorCode::invalid_argument, "evaluate: skeleton joint count does not match layout");
  EvalReport report;
  const std::vector<SkeletonMatch> matches = match_skeletons(gt, pred);
  bool any_joint = false;
  for (const SkeletonMatch& m : matches) any_joint = any_joint || m.shared_joints > 0;
  report.mpjpe_cm = any_joint ? mpjpe_cm(gt, pred, matches) : std::numeric_limits<double>::quiet_NaN();
  report.pcp = pcp(gt, pred, matches, layout);
  report.matched_pairs = static_cast<int>(matches.size());
  report.unmatched_predictions = static_cast<int>(pred.size()) - report.matched_pairs;
  report.unmatched_groundtruths = static_cast<int>(gt.size()) - report.matched_pairs;
  return report;
}

std::string report_to_json(const EvalReport& report) {
  ordered_json doc;
  doc["mpjpe_cm"] = report.mpjpe_cm;  // NaN serializes as null
  ordered_json groups = ordered_json::array();
  for (const PcpGroup& g : report.pcp.groups) {
    ordered_json entry;
    entry["name"] = g.name;
    entry["correct"] = g.correct;
    entry["total"] = g.total;
    entry["percent"] = g.percent();
    groups.push_back(std::move(entry));
  }
  doc["pcp"]["groups"] = std::move(groups);
  doc["pcp"]["average"] = report.pcp.average;
  doc["counts"]["matched_pairs"] = report.matched_pairs;
  doc["counts"]["unmatched_predictions"] = report.unmatched_predictions;
  doc["counts"]["unmatched_groundtruths"] = report.unmatched_groundtruths;
  return doc.dump(2) + "\n";
}

std::string report_to_table(const EvalReport& report) {
  std::ostringstream out;
  out << std::fixed;
  out << "metric            value\n";
  out << "----------------  ---------------\n";
  out << std::left << std::setw(18) << "MPJPE (cm)";
  if (std::isnan(report.mpjpe_cm))
    out << "n/a\n";
  else
    out << std::setprecision(3) << report.mpjpe_cm << "\n";
  for (const PcpGroup& g : report.pcp.groups) {
    out << std::setw(18) << ("PCP " + g.name) << std::setprecision(1) << g.percent() << "%  (" << g.correct << "/"
        << g.total << ")\n";
  }
  out << std::setw(18) << "PCP average" << std::setprecision(1) << report.pcp.average << "%\n";
  out << std::setw(18) << "skeletons"
      << "matched " << report.matched_pairs << "  extra pred " << report.unmatched_predictions << "  missed gt "
      << report.unmatched_groundtruths << "\n";
  return out.str();
}

}  // namespace voxpaf

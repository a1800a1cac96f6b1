#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "support.hpp"
#include "voxpaf/config.hpp"
#include "voxpaf/decoder.hpp"
#include "voxpaf/peaks.hpp"
#include "voxpaf/synth.hpp"
#include "voxpaf/targets.hpp"

using namespace voxpaf;

namespace {

PoseLayout two_joint_layout() {
  PoseLayout layout;
  layout.joint_names = {"neck", "nose"};
  layout.paf_edges = {{0, 1}};
  return layout;
}

// Volume whose edge-0 triple is a constant vector everywhere.
Volume constant_field(const VoxelGrid& grid, const Vec3& v) {
  Volume out(grid, 3);
  for (int x = 0; x < grid.dims[0]; ++x)
    for (int y = 0; y < grid.dims[1]; ++y)
      for (int z = 0; z < grid.dims[2]; ++z) {
        out.at(x, y, z, 0) = static_cast<float>(v.x);
        out.at(x, y, z, 1) = static_cast<float>(v.y);
        out.at(x, y, z, 2) = static_cast<float>(v.z);
      }
  return out;
}

Peak peak_at(double x, double y, double z) { return Peak{{x, y, z}, 1.0}; }

// Canonical comparison key for a decoded skeleton set.
std::vector<std::string> canonical_skeleton_set(std::vector<Skeleton> skeletons, const PoseLayout& layout) {
  std::sort(skeletons.begin(), skeletons.end(), [](const Skeleton& a, const Skeleton& b) {
    const double ax = a.joints[0] ? a.joints[0]->position.x : 1e18;
    const double bx = b.joints[0] ? b.joints[0]->position.x : 1e18;
    return ax < bx;
  });
  std::vector<std::string> keys;
  for (const Skeleton& s : skeletons) keys.push_back(skeletons_to_json({s}, layout));
  return keys;
}

struct RenderedScene {
  std::vector<Skeleton> people;
  Volume heatmaps;
  Volume vectormaps;
};

RenderedScene rendered_scene(int n_people, std::uint64_t seed, double min_separation = 0.6) {
  const PipelineConfig config;
  const PoseLayout layout = PoseLayout::cmu14();
  SceneSpec spec;
  spec.n_people = n_people;
  spec.seed = seed;
  spec.min_separation = min_separation;
  std::vector<Skeleton> people = generate_scene(spec);
  Volume hm = render_heatmaps(people, config.grid, config.sigma_voxels, layout);
  Volume vm = render_vectormaps(people, config.grid, layout, config.limb_radius_voxels);
  return {std::move(people), std::move(hm), std::move(vm)};
}

}  // namespace

TEST_CASE("limb score is the mean directional agreement along the segment") {
  VoxelGrid grid{{0.0, 0.0, 0.0}, {8, 8, 8}, 0.1};

  SUBCASE("aligned constant field scores one") {
    const Volume vm = constant_field(grid, {0.0, 0.0, 1.0});
    const double s = paf_score(vm, 0, {2.0, 2.0, 1.0}, {2.0, 2.0, 6.0}, 10);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    const double r = paf_score(vm, 0, {2.0, 2.0, 6.0}, {2.0, 2.0, 1.0}, 10);
    CHECK(r == doctest::Approx(-1.0).epsilon(1e-12));
  }

  SUBCASE("orthogonal constant field scores zero") {
    const Volume vm = constant_field(grid, {0.0, 0.0, 1.0});
    const double s = paf_score(vm, 0, {1.0, 1.0, 3.0}, {5.0, 1.0, 3.0}, 10);
    CHECK(std::abs(s) <= 1e-12);
  }

  SUBCASE("zero field scores zero") {
    const Volume vm(grid, 3);
    CHECK(paf_score(vm, 0, {1.0, 1.0, 1.0}, {5.0, 5.0, 5.0}, 10) == 0.0);
  }

  SUBCASE("a zero-length candidate scores zero") {
    const Volume vm = constant_field(grid, {1.0, 0.0, 0.0});
    CHECK(paf_score(vm, 0, {3.0, 3.0, 3.0}, {3.0, 3.0, 3.0}, 10) == 0.0);
  }

  SUBCASE("argument validation") {
    const Volume vm(grid, 3);
    CHECK_THROWS_AS(paf_score(vm, 0, {0, 0, 0}, {1, 1, 1}, 1), Error);
    CHECK_THROWS_AS(paf_score(vm, 1, {0, 0, 0}, {1, 1, 1}, 10), Error);
    CHECK_THROWS_AS(paf_score(vm, -1, {0, 0, 0}, {1, 1, 1}, 10), Error);
    const Volume bad(grid, 4);
    CHECK_THROWS_AS(paf_score(bad, 0, {0, 0, 0}, {1, 1, 1}, 10), Error);
  }
}

TEST_CASE("a rendered limb on voxel centers scores essentially one") {
  VoxelGrid grid{{0.0, 0.0, 0.0}, {16, 16, 16}, 0.1};
  const PoseLayout layout = two_joint_layout();
  Skeleton s;
  s.joints.push_back(Joint{grid_to_world(grid, {6.0, 6.0, 3.0}), 1.0});
  s.joints.push_back(Joint{grid_to_world(grid, {6.0, 6.0, 8.0}), 1.0});
  const Volume vm = render_vectormaps({s}, grid, layout, 1.0);

  const double forward = paf_score(vm, 0, {6.0, 6.0, 3.0}, {6.0, 6.0, 8.0}, 10);
  CHECK(forward >= 0.95);
  CHECK(forward == doctest::Approx(1.0).epsilon(1e-9));
  const double backward = paf_score(vm, 0, {6.0, 6.0, 8.0}, {6.0, 6.0, 3.0}, 10);
  CHECK(backward <= -0.95);
}

TEST_CASE("rendered limbs at arbitrary sub-voxel positions still score high") {
  VoxelGrid grid{{0.0, 0.0, 0.0}, {24, 24, 24}, 0.1};
  const PoseLayout layout = two_joint_layout();
  Rng rng(909);
  int tested = 0;
  while (tested < 20) {
    const Vec3 a{rng.uniform(0.6, 1.8), rng.uniform(0.6, 1.8), rng.uniform(0.6, 1.8)};
    const Vec3 b = a + rng.unit_vector() * rng.uniform(0.5, 0.9);
    if (b.x < 0.5 || b.x > 1.9 || b.y < 0.5 || b.y > 1.9 || b.z < 0.5 || b.z > 1.9) continue;
    ++tested;

    Skeleton s;
    s.joints.push_back(Joint{a, 1.0});
    s.joints.push_back(Joint{b, 1.0});
    const Volume vm = render_vectormaps({s}, grid, layout, 1.0);
    const double forward = paf_score(vm, 0, world_to_grid(grid, a), world_to_grid(grid, b), 10);
    const double backward = paf_score(vm, 0, world_to_grid(grid, b), world_to_grid(grid, a), 10);
    // Short limbs lose some magnitude at the endpoint samples, where the
    // trilinear neighborhood pokes out of the rendered tube.
    CHECK(forward >= 0.75);
    CHECK(backward <= -0.75);
  }
}

TEST_CASE("a lone compatible pair becomes one connection") {
  VoxelGrid grid{{0.0, 0.0, 0.0}, {8, 8, 8}, 0.1};
  const Volume vm = constant_field(grid, {0.0, 0.0, 1.0});
  const std::vector<Peak> parents = {peak_at(2, 2, 1)};
  const std::vector<Peak> children = {peak_at(2, 2, 6)};
  const auto matches = match_limb(vm, 0, parents, children, 10, 0.2);
  REQUIRE(matches.size() == 1);
  CHECK(matches[0].parent == 0);
  CHECK(matches[0].child == 0);
  CHECK(matches[0].score == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("parallel disjoint limbs match one-to-one") {
  VoxelGrid grid{{0.0, 0.0, 0.0}, {24, 24, 16}, 0.1};
  const PoseLayout layout = two_joint_layout();
  std::vector<Skeleton> people(2);
  people[0].joints = {Joint{grid_to_world(grid, {4.0, 8.0, 3.0}), 1.0}, Joint{grid_to_world(grid, {4.0, 8.0, 10.0}), 1.0}};
  people[1].joints = {Joint{grid_to_world(grid, {18.0, 8.0, 3.0}), 1.0}, Joint{grid_to_world(grid, {18.0, 8.0, 10.0}), 1.0}};
  const Volume vm = render_vectormaps(people, grid, layout, 1.0);

  const std::vector<Peak> parents = {peak_at(4, 8, 3), peak_at(18, 8, 3)};
  const std::vector<Peak> children = {peak_at(4, 8, 10), peak_at(18, 8, 10)};
  const auto matches = match_limb(vm, 0, parents, children, 10, 0.2);
  REQUIRE(matches.size() == 2);
  for (const LimbMatch& m : matches) {
    CHECK(m.parent == m.child);
    CHECK(m.score >= 0.9);
  }
}

TEST_CASE("matching with nothing to connect is empty") {
  VoxelGrid grid{{0.0, 0.0, 0.0}, {8, 8, 8}, 0.1};
  const Volume vm = constant_field(grid, {0.0, 0.0, 1.0});
  CHECK(match_limb(vm, 0, {}, {peak_at(1, 1, 1)}, 10, 0.2).empty());
  CHECK(match_limb(vm, 0, {peak_at(1, 1, 1)}, {}, 10, 0.2).empty());

  // Scores below the floor are discarded even when candidates exist.
  const Volume zero(grid, 3);
  CHECK(match_limb(zero, 0, {peak_at(2, 2, 1)}, {peak_at(2, 2, 6)}, 10, 0.2).empty());
}

TEST_CASE("greedy selection agrees with an independent replay of its rule") {
  VoxelGrid grid{{0.0, 0.0, 0.0}, {10, 10, 10}, 0.1};
  Rng rng(515);
  int total_matches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Volume vm(grid, 3);
    for (auto& f : vm.data) f = static_cast<float>(rng.uniform(-1.0, 1.0));

    const int np = static_cast<int>(rng.uniform_int(0, 4));
    const int nc = static_cast<int>(rng.uniform_int(0, 4));
    std::vector<Peak> parents, children;
    for (int i = 0; i < np; ++i) parents.push_back(peak_at(rng.uniform(1.0, 8.0), rng.uniform(1.0, 8.0), rng.uniform(1.0, 8.0)));
    for (int j = 0; j < nc; ++j) children.push_back(peak_at(rng.uniform(1.0, 8.0), rng.uniform(1.0, 8.0), rng.uniform(1.0, 8.0)));

    const double threshold = 0.05;
    std::vector<oracle::ScoredPair> pairs;
    for (int i = 0; i < np; ++i)
      for (int j = 0; j < nc; ++j)
        pairs.push_back({paf_score(vm, 0, parents[i].position, children[j].position, 10), i, j});
    const auto want = oracle::greedy_replay(pairs, threshold);

    const auto got = match_limb(vm, 0, parents, children, 10, threshold);
    REQUIRE(got.size() == want.size());
    for (std::size_t k = 0; k < got.size(); ++k) {
      CHECK(got[k].parent == want[k][0]);
      CHECK(got[k].child == want[k][1]);
    }
    total_matches += static_cast<int>(got.size());
  }
  CHECK(total_matches > 30);  // the instances must actually exercise selection
}

TEST_CASE("decoding rendered volumes of one person recovers that person") {
  const PoseLayout layout = PoseLayout::cmu14();
  const PipelineConfig config;
  const RenderedScene scene = rendered_scene(1, 5);

  const auto decoded = decode(scene.heatmaps, scene.vectormaps, layout, config.decoder);
  REQUIRE(decoded.size() == 1);
  CHECK(decoded[0].present_count() == layout.joint_count());
  for (int j = 0; j < layout.joint_count(); ++j) {
    REQUIRE(decoded[0].joints[j].has_value());
    const double err = (decoded[0].joints[j]->position - scene.people[0].joints[j]->position).norm();
    CHECK(err <= 0.5 * config.grid.voxel_size);
    CHECK(decoded[0].joints[j]->confidence > 0.3);
    CHECK(decoded[0].joints[j]->confidence <= 1.0);
  }
}

TEST_CASE("decoding a three-person scene keeps people separate") {
  const PoseLayout layout = PoseLayout::cmu14();
  const PipelineConfig config;
  const RenderedScene scene = rendered_scene(3, 11, 1.2);

  const auto decoded = decode(scene.heatmaps, scene.vectormaps, layout, config.decoder);
  REQUIRE(decoded.size() == 3);

  // Upper bound: no more skeletons than peaks of any single joint.
  const auto peaks = detect_peaks(scene.heatmaps, config.decoder.peaks);
  std::size_t max_peaks = 0;
  for (const auto& channel : peaks) max_peaks = std::max(max_peaks, channel.size());
  CHECK(decoded.size() <= max_peaks);

  // Every decoded person maps onto exactly one generated person.
  std::vector<char> taken(scene.people.size(), 0);
  for (const Skeleton& pred : decoded) {
    REQUIRE(pred.joints[0].has_value());
    int best = -1;
    double best_d = 1e18;
    for (std::size_t g = 0; g < scene.people.size(); ++g) {
      const double d = (pred.joints[0]->position - scene.people[g].joints[0]->position).norm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(g);
      }
    }
    REQUIRE(best >= 0);
    CHECK(!taken[best]);
    taken[best] = 1;
    for (int j = 0; j < layout.joint_count(); ++j) {
      REQUIRE(pred.joints[j].has_value());
      CHECK((pred.joints[j]->position - scene.people[best].joints[j]->position).norm() <= 0.05);
    }
  }
}

TEST_CASE("the minimum-joint filter drops sparse hypotheses at the boundary") {
  const PoseLayout layout = PoseLayout::cmu14();
  const PipelineConfig config;
  const RenderedScene scene = rendered_scene(1, 23);

  DecoderParams keep = config.decoder;
  keep.min_joints = layout.joint_count();
  CHECK(decode(scene.heatmaps, scene.vectormaps, layout, keep).size() == 1);

  DecoderParams drop = config.decoder;
  drop.min_joints = layout.joint_count() + 1;
  CHECK(decode(scene.heatmaps, scene.vectormaps, layout, drop).empty());
}

TEST_CASE("an empty scene decodes to no skeletons") {
  const PoseLayout layout = PoseLayout::cmu14();
  const PipelineConfig config;
  const Volume hm(config.grid, layout.joint_count());
  const Volume vm(config.grid, 3 * layout.paf_count());
  CHECK(decode(hm, vm, layout, config.decoder).empty());
}

TEST_CASE("decode is peak detection followed by assembly") {
  const PoseLayout layout = PoseLayout::cmu14();
  const PipelineConfig config;
  const RenderedScene scene = rendered_scene(2, 42);

  const auto direct = decode(scene.heatmaps, scene.vectormaps, layout, config.decoder);
  const auto peaks = detect_peaks(scene.heatmaps, config.decoder.peaks);
  const auto staged = assemble(peaks, scene.vectormaps, layout, config.decoder);
  CHECK(skeletons_to_json(direct, layout) == skeletons_to_json(staged, layout));

  const auto again = decode(scene.heatmaps, scene.vectormaps, layout, config.decoder);
  CHECK(skeletons_to_json(direct, layout) == skeletons_to_json(again, layout));
}

TEST_CASE("assembly does not depend on the order of each joint's peak list") {
  const PoseLayout layout = PoseLayout::cmu14();
  const PipelineConfig config;
  const RenderedScene scene = rendered_scene(3, 77, 1.2);

  auto peaks = detect_peaks(scene.heatmaps, config.decoder.peaks);
  const auto baseline = assemble(peaks, scene.vectormaps, layout, config.decoder);
  for (auto& channel : peaks) std::reverse(channel.begin(), channel.end());
  const auto shuffled = assemble(peaks, scene.vectormaps, layout, config.decoder);

  CHECK(canonical_skeleton_set(baseline, layout) == canonical_skeleton_set(shuffled, layout));
}

TEST_CASE("decode validates its inputs") {
  const PoseLayout layout = PoseLayout::cmu14();
  const PipelineConfig config;
  const Volume hm(config.grid, layout.joint_count());
  const Volume vm(config.grid, 3 * layout.paf_count());

  VoxelGrid other = config.grid;
  other.voxel_size = 0.1;
  const Volume vm_other(other, 3 * layout.paf_count());
  CHECK_THROWS_AS(decode(hm, vm_other, layout, config.decoder), Error);

  const Volume hm_bad(config.grid, layout.joint_count() + 1);
  CHECK_THROWS_AS(decode(hm_bad, vm, layout, config.decoder), Error);

  const Volume vm_bad(config.grid, 3 * layout.paf_count() - 3);
  CHECK_THROWS_AS(decode(hm, vm_bad, layout, config.decoder), Error);

  std::vector<std::vector<Peak>> wrong_width(layout.joint_count() - 1);
  CHECK_THROWS_AS(assemble(wrong_width, vm, layout, config.decoder), Error);

  PoseLayout broken;
  broken.joint_names = {"neck", "nose", "left_hip", "right_hip"};
  broken.paf_edges = {{0, 1}, {2, 3}};  // second component never reaches the root
  std::vector<std::vector<Peak>> peaks(4);
  const Volume vm_two(config.grid, 6);
  CHECK_THROWS_AS(assemble(peaks, vm_two, broken, config.decoder), Error);
}

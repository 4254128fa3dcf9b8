#include "doctest.h"
#include "test_support.hpp"
#include "woodleaf/wood_verify.hpp"

#include <algorithm>

using namespace woodleaf;
using namespace woodleaf::testing;

namespace {

Partition split_by(const std::vector<ClassLabel>& labels) {
  Partition p;
  for (PointIndex i = 0; i < labels.size(); ++i) (labels[i] == ClassLabel::Wood ? p.wood : p.leaf).push_back(i);
  return p;
}

/// Cloud on [0,1] x [0,1] x [0,9] with 10 divisions (0.1 x 0.1 x 0.9 voxels) and
/// a height split of 3, so layers 0..2 are the lower region.
struct LayerScene {
  std::vector<Point> pts{{0, 0, 0, 50}, {1, 1, 9, 50}};
  std::vector<ClassLabel> labels{ClassLabel::Wood, ClassLabel::Leaf};

  PointIndex add(double x, double y, double z, ClassLabel l, double intensity = 50) {
    pts.push_back({x, y, z, intensity});
    labels.push_back(l);
    return static_cast<PointIndex>(pts.size() - 1);
  }
};

}  // namespace

TEST_CASE("height split") {
  CHECK(tree_height_split(cloud_of({{0, 0, 0, 0}, {0, 0, 9, 0}, {0, 0, 4, 0}}), 1.0 / 3.0) == doctest::Approx(3.0));
  CHECK(tree_height_split(cloud_of({{0, 0, 2, 0}, {0, 0, 14, 0}}), 1.0 / 3.0) == doctest::Approx(6.0));
  CHECK(tree_height_split(cloud_of({{0, 0, 1.5, 0}, {1, 1, 1.5, 0}}), 1.0 / 3.0) == 1.5);
}

TEST_CASE("lower-region growth") {
  LayerScene s;
  const PipelineParams params;
  using L = ClassLabel;

  SUBCASE("nothing to promote below the split") {
    s.add(0.05, 0.05, 0.1, L::Wood);
    s.add(0.15, 0.05, 0.1, L::Wood);
    s.add(0.55, 0.55, 8.0, L::Leaf);
    const auto cloud = cloud_of(s.pts);
    const VoxelGrid grid(cloud.points, iota_set(s.pts.size()), 10);
    const auto parts = split_by(s.labels);
    auto state = make_verification_state(cloud, parts.wood, parts.leaf, grid, params, 50);
    CHECK(grow_lower_region(state) == 0);
    CHECK(state.labels == s.labels);
  }

  SUBCASE("one-step growth into an adjacent voxel of the same layer") {
    for (double z : {0.1, 1.0, 2.0}) s.add(0.05, 0.05, z, L::Wood);  // trunk column
    const auto a = s.add(0.05, 0.15, 1.0, L::Leaf);
    const auto b = s.add(0.06, 0.16, 1.05, L::Leaf);
    const auto cloud = cloud_of(s.pts);
    const VoxelGrid grid(cloud.points, iota_set(s.pts.size()), 10);
    const auto parts = split_by(s.labels);
    auto state = make_verification_state(cloud, parts.wood, parts.leaf, grid, params, 50);
    CHECK(grow_lower_region(state) == 2);
    CHECK(state.labels[a] == L::Wood);
    CHECK(state.labels[b] == L::Wood);
  }

  SUBCASE("chain v1 - v2 - v3 in one layer, v1 wood") {
    const auto v1 = s.add(0.05, 0.55, 0.1, L::Wood);
    const auto v2 = s.add(0.15, 0.55, 0.1, L::Leaf);
    const auto v3 = s.add(0.25, 0.65, 0.1, L::Leaf);     // diagonal of v2
    const auto apart = s.add(0.45, 0.55, 0.1, L::Leaf);  // two voxels from v3
    const auto above = s.add(0.05, 0.55, 1.0, L::Leaf);  // next layer up
    const auto cloud = cloud_of(s.pts);
    const VoxelGrid grid(cloud.points, iota_set(s.pts.size()), 10);
    const auto parts = split_by(s.labels);
    auto state = make_verification_state(cloud, parts.wood, parts.leaf, grid, params, 50);
    CHECK(grow_lower_region(state) == 2);
    CHECK(state.labels[v1] == L::Wood);
    CHECK(state.labels[v2] == L::Wood);
    CHECK(state.labels[v3] == L::Wood);
    CHECK(state.labels[apart] == L::Leaf);
    CHECK(state.labels[above] == L::Leaf);
  }

  SUBCASE("upper-region voxels do not grow") {
    s.add(0.55, 0.55, 8.0, L::Wood);
    const auto n = s.add(0.65, 0.55, 8.0, L::Leaf, 0);
    const auto cloud = cloud_of(s.pts);
    const VoxelGrid grid(cloud.points, iota_set(s.pts.size()), 10);
    const auto parts = split_by(s.labels);
    auto state = make_verification_state(cloud, parts.wood, parts.leaf, grid, params, 50);
    CHECK(grow_lower_region(state) == 0);
    CHECK(state.labels[n] == L::Leaf);
  }
}

TEST_CASE("upper-region distance and intensity tests") {
  // Scanner at the origin, angular step 1e-3: S_s(w) = 0.01 at w = (10, 0, 0).
  const double theta = 0.001, threshold = 50.0;
  const SpacingModel spacing(theta);
  const PipelineParams params;
  const auto run = [&](double y, double intensity) {
    std::vector<Point> pts{{10, 0, 0, 80}, {10, y, 0, intensity}, {10, 1, -9, 0}};
    const auto cloud = cloud_of(pts);
    const VoxelGrid grid(cloud.points, iota_set(3), 10);
    auto state = make_verification_state(cloud, IndexSet{0}, IndexSet{1, 2}, grid, params, threshold);
    REQUIRE(state.upper[state.slot_of_point[0]]);
    verify_upper_region(state, cloud, spacing);
    return state.labels[1] == ClassLabel::Wood;
  };
  CHECK(run(0.015, 0.0));        // within sd1 * S_s = 0.02
  CHECK(run(0.05, threshold));   // within sd2 * S_s = 0.06 and bright enough
  CHECK_FALSE(run(0.05, 49.9));  // within sd2 * S_s but too dark
  CHECK_FALSE(run(0.07, 99.0));  // beyond sd2 * S_s
}

TEST_CASE("upper-region promotions propagate from newly promoted points") {
  std::vector<Point> pts{{10, 0, 0, 80}, {10, 0.015, 0, 0}, {10, 0.03, 0, 0}, {10, 0.045, 0, 0}, {10, 1, -9, 0}};
  const auto cloud = cloud_of(pts);
  const VoxelGrid grid(cloud.points, iota_set(pts.size()), 10);
  auto state = make_verification_state(cloud, IndexSet{0}, IndexSet{1, 2, 3, 4}, grid, PipelineParams{}, 50);
  CHECK(verify_upper_region(state, cloud, SpacingModel(0.001)) == 3);
  CHECK(state.labels[3] == ClassLabel::Wood);
  CHECK(state.labels[4] == ClassLabel::Leaf);
}

TEST_CASE("verification with no leaf points returns its input") {
  const auto pts = random_points(300, 4, 1.0, 3.0);
  const auto cloud = cloud_of(pts);
  const VoxelGrid grid(cloud.points, iota_set(pts.size()), 20);
  const auto out = verify_wood(cloud, iota_set(pts.size()), IndexSet{}, grid, {{}, 1e-3}, PipelineParams{}, 50);
  CHECK(out.wood == iota_set(pts.size()));
  CHECK(out.leaf.empty());
}

TEST_CASE("verification is monotone and idempotent on random labellings") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto pts = random_points(2000, seed, 2.0, 4.0);
    const auto cloud = cloud_of(pts);
    IndexSet wood, leaf;
    for (PointIndex i = 0; i < pts.size(); ++i) (i % 7 == 0 ? wood : leaf).push_back(i);
    const VoxelGrid grid(cloud.points, wood, 25);
    const ScanConfig scan{{}, 2e-3};
    const auto once = verify_wood(cloud, wood, leaf, grid, scan, PipelineParams{}, 60);
    CHECK(std::includes(once.wood.begin(), once.wood.end(), wood.begin(), wood.end()));
    CHECK(once.wood.size() + once.leaf.size() == pts.size());
    const auto twice = verify_wood(cloud, once.wood, once.leaf, grid, scan, PipelineParams{}, 60);
    CHECK(twice.wood == once.wood);
    CHECK(twice.leaf == once.leaf);
  }
}

TEST_CASE("state construction rejects overlapping or incomplete partitions") {
  const auto cloud = cloud_of(random_points(10, 1));
  const VoxelGrid grid(cloud.points, iota_set(10), 4);
  CHECK_THROWS_AS(make_verification_state(cloud, IndexSet{0, 1}, IndexSet{1, 2, 3, 4, 5, 6, 7, 8, 9}, grid,
                                          PipelineParams{}, 0),
                  Error);
  CHECK_THROWS_AS(make_verification_state(cloud, IndexSet{0}, IndexSet{1}, grid, PipelineParams{}, 0), Error);
}

#include "woodleaf/wood_verify.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace woodleaf {

double tree_height_split(const LabeledCloud& cloud, double height_fraction) {
  if (cloud.points.empty()) throw Error(ErrorCode::InvalidArgument, "height split of an empty cloud");
  const auto [lo, hi] = std::minmax_element(cloud.points.begin(), cloud.points.end(),
                                            [](const Point& a, const Point& b) { return a.z < b.z; });
  return lo->z + height_fraction * (hi->z - lo->z);
}

std::size_t VerificationState::wood_size() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), ClassLabel::Wood));
}

VerificationState make_verification_state(const LabeledCloud& cloud, std::span<const PointIndex> wood,
                                          std::span<const PointIndex> leaf, const VoxelGrid& grid,
                                          const PipelineParams& params, double intensity_threshold) {
  const std::size_t n = cloud.size();
  VerificationState s;
  s.labels.assign(n, ClassLabel::Unassigned);
  for (PointIndex i : wood) s.labels.at(i) = ClassLabel::Wood;
  for (PointIndex i : leaf) {
    if (s.labels.at(i) != ClassLabel::Unassigned) {
      throw Error(ErrorCode::InvalidArgument, "point " + std::to_string(i) + " is both wood and leaf");
    }
    s.labels[i] = ClassLabel::Leaf;
  }
  if (wood.size() + leaf.size() != n ||
      std::find(s.labels.begin(), s.labels.end(), ClassLabel::Unassigned) != s.labels.end()) {
    throw Error(ErrorCode::InvalidArgument, "wood and leaf sets must partition the cloud");
  }

  s.grid = &grid;
  s.z_split = tree_height_split(cloud, params.height_fraction);
  s.intensity_threshold = intensity_threshold;
  s.sd1 = params.sd1;
  s.sd2 = params.sd2;

  IndexSet all(n);
  std::iota(all.begin(), all.end(), PointIndex{0});
  s.buckets = grid.reindex_points(cloud.points, all);
  const std::size_t voxels = s.buckets.voxel_count();
  s.slot_of_point.assign(n, 0);
  s.wood_count.assign(voxels, 0);
  s.upper.assign(voxels, false);
  s.queued.assign(voxels, false);
  for (std::size_t v = 0; v < voxels; ++v) {
    s.upper[v] = grid.center(grid.unkey(s.buckets.key(v))).z >= s.z_split;
    for (PointIndex p : s.buckets.bucket(v)) {
      s.slot_of_point[p] = static_cast<std::uint32_t>(v);
      if (s.labels[p] == ClassLabel::Wood) {
        ++s.wood_count[v];
        if (s.upper[v]) s.frontier.push_back(p);
      }
    }
  }
  std::sort(s.frontier.begin(), s.frontier.end());
  return s;
}

namespace {

/// Slots of occupied voxels around `slot` (excluding it), ascending.
std::vector<std::uint32_t> occupied_neighbors(const VerificationState& s, std::uint32_t slot, NeighborMode mode) {
  std::vector<std::uint32_t> out;
  const VoxelGrid& grid = *s.grid;
  for (const VoxelIndex& u : grid.neighbors(grid.unkey(s.buckets.key(slot)), mode)) {
    const auto found = s.buckets.find(grid.key(u));
    if (found >= 0) out.push_back(static_cast<std::uint32_t>(found));
  }
  return out;
}

}  // namespace

std::size_t grow_lower_region(VerificationState& s) {
  std::deque<std::uint32_t> queue;
  for (std::uint32_t v = 0; v < s.wood_count.size(); ++v) {
    if (!s.upper[v] && s.wood_count[v] > 0 && !s.queued[v]) {
      s.queued[v] = true;
      queue.push_back(v);
    }
  }
  std::size_t promoted = 0;
  while (!queue.empty()) {
    const std::uint32_t v = queue.front();
    queue.pop_front();
    for (std::uint32_t u : occupied_neighbors(s, v, NeighborMode::SameLayer3x3)) {
      for (PointIndex p : s.buckets.bucket(u)) {
        if (s.labels[p] == ClassLabel::Leaf) {
          s.labels[p] = ClassLabel::Wood;
          ++s.wood_count[u];
          ++promoted;
        }
      }
      if (!s.queued[u]) {
        s.queued[u] = true;
        queue.push_back(u);
      }
    }
  }
  return promoted;
}

std::size_t verify_upper_region(VerificationState& s, const LabeledCloud& cloud, const SpacingModel& spacing) {
  std::size_t promoted_total = 0;
  std::vector<PointIndex> nearby_leaf;
  std::vector<PointIndex> promote;
  while (!s.frontier.empty()) {
    promote.clear();
    // Group the frontier by voxel so each neighbourhood's leaf list is gathered once.
    std::vector<PointIndex> frontier = std::move(s.frontier);
    s.frontier.clear();
    std::stable_sort(frontier.begin(), frontier.end(),
                     [&](PointIndex a, PointIndex b) { return s.slot_of_point[a] < s.slot_of_point[b]; });
    for (std::size_t i = 0; i < frontier.size();) {
      const std::uint32_t v = s.slot_of_point[frontier[i]];
      std::size_t j = i;
      while (j < frontier.size() && s.slot_of_point[frontier[j]] == v) ++j;
      if (!s.upper[v]) {
        i = j;
        continue;
      }
      nearby_leaf.clear();
      auto gather = [&](std::uint32_t slot) {
        if (s.wood_count[slot] == s.buckets.bucket(slot).size()) return;
        for (PointIndex p : s.buckets.bucket(slot)) {
          if (s.labels[p] == ClassLabel::Leaf) nearby_leaf.push_back(p);
        }
      };
      gather(v);
      for (std::uint32_t u : occupied_neighbors(s, v, NeighborMode::Cube3x3x3)) gather(u);
      if (!nearby_leaf.empty()) {
        for (std::size_t f = i; f < j; ++f) {
          const Point& w = cloud.points[frontier[f]];
          const double ss = spacing.spacing_at(w);
          const double near2 = (s.sd1 * ss) * (s.sd1 * ss);
          const double far2 = (s.sd2 * ss) * (s.sd2 * ss);
          for (PointIndex l : nearby_leaf) {
            const Point& q = cloud.points[l];
            const double dx = q.x - w.x, dy = q.y - w.y, dz = q.z - w.z;
            const double d2 = dx * dx + dy * dy + dz * dz;
            if (d2 <= near2 || (d2 <= far2 && q.intensity >= s.intensity_threshold)) promote.push_back(l);
          }
        }
      }
      i = j;
    }
    // Commit the sweep at once so the outcome is independent of visiting order.
    std::sort(promote.begin(), promote.end());
    promote.erase(std::unique(promote.begin(), promote.end()), promote.end());
    for (PointIndex p : promote) {
      s.labels[p] = ClassLabel::Wood;
      const std::uint32_t slot = s.slot_of_point[p];
      ++s.wood_count[slot];
      if (s.upper[slot]) s.frontier.push_back(p);
    }
    promoted_total += promote.size();
  }
  return promoted_total;
}

Partition verify_wood(const LabeledCloud& cloud, std::span<const PointIndex> wood_c,
                      std::span<const PointIndex> leaf_d, const VoxelGrid& grid, const ScanConfig& scan,
                      const PipelineParams& params, double intensity_threshold) {
  const SpacingModel spacing(scan.angular_step);
  VerificationState state = make_verification_state(cloud, wood_c, leaf_d, grid, params, intensity_threshold);
  for (;;) {
    std::size_t promoted = grow_lower_region(state);
    promoted += verify_upper_region(state, cloud, spacing);
    if (promoted == 0) break;
  }
  Partition out;
  for (std::size_t i = 0; i < state.labels.size(); ++i) {
    (state.labels[i] == ClassLabel::Wood ? out.wood : out.leaf).push_back(static_cast<PointIndex>(i));
  }
  return out;
}

}  // namespace woodleaf

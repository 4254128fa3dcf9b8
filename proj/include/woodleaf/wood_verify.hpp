// Wood points verification: promotes misclassified leaf points back to wood.
//
// Below the height split, voxel-level growth inside each horizontal voxel layer;
// above it, point-level distance/intensity tests against nearby wood points.
// Both rules only ever turn leaf into wood, so they run to a joint fixpoint.
#pragma once

#include "woodleaf/geometry_refine.hpp"
#include "woodleaf/spatial_index.hpp"
#include "woodleaf/types.hpp"

namespace woodleaf {

/// z_min + fraction * (z_max - z_min) over the whole cloud.
double tree_height_split(const LabeledCloud& cloud, double height_fraction);

struct VerificationState {
  /// Working labels for every point; only Wood and Leaf occur.
  std::vector<ClassLabel> labels;
  /// Non-owning; must outlive the state.
  const VoxelGrid* grid = nullptr;
  /// Every point of the cloud bucketed in `grid`.
  VoxelBuckets buckets;
  std::vector<std::uint32_t> slot_of_point;
  std::vector<std::uint32_t> wood_count;  // per bucket slot
  std::vector<bool> upper;                // per bucket slot: centre z >= z_split
  std::vector<bool> queued;               // lower-region BFS bookkeeping
  /// Upper-region wood points not yet paired against nearby leaf points.
  std::vector<PointIndex> frontier;
  double z_split = 0.0;
  double intensity_threshold = 0.0;
  double sd1 = 2.0;
  double sd2 = 6.0;

  std::size_t wood_size() const;
  std::size_t leaf_size() const { return labels.size() - wood_size(); }
};

VerificationState make_verification_state(const LabeledCloud& cloud, std::span<const PointIndex> wood,
                                          std::span<const PointIndex> leaf, const VoxelGrid& grid,
                                          const PipelineParams& params, double intensity_threshold);

/// Breadth-first growth over same-layer 3x3 neighbours of lower-region wood
/// voxels: every occupied neighbour becomes wood, all its points included.
/// Returns the number of promoted points.
std::size_t grow_lower_region(VerificationState& state);

/// Promotes leaf point l near wood point w (same or adjacent voxel, w's voxel in
/// the upper region) when |w-l| <= sd1*S_s(w), or |w-l| <= sd2*S_s(w) and
/// intensity(l) >= threshold. Sweeps are synchronous and repeat to a fixpoint.
/// Returns the number of promoted points.
std::size_t verify_upper_region(VerificationState& state, const LabeledCloud& cloud, const SpacingModel& spacing);

/// Runs both regimes until neither promotes anything.
Partition verify_wood(const LabeledCloud& cloud, std::span<const PointIndex> wood_c,
                      std::span<const PointIndex> leaf_d, const VoxelGrid& grid, const ScanConfig& scan,
                      const PipelineParams& params, double intensity_threshold);

}  // namespace woodleaf

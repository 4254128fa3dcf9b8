// Second and third classification steps: k-NN spacing refinement of wood A and
// voxel density-ratio refinement of wood B.
#pragma once

#include "woodleaf/spatial_index.hpp"
#include "woodleaf/types.hpp"

namespace woodleaf {

/// Expected point spacing at range d for a scanner with angular step theta: d * theta.
struct SpacingModel {
  double angular_step = 0.0;  // radians, > 0

  explicit SpacingModel(double theta);
  /// Throws when the point sits on the scanner (zero range).
  double spacing_at(const Point& p) const;
};

/// Mean distance from `point` to its k nearest indexed neighbours; divides by the
/// number actually returned when the index holds fewer than k+1 points.
double mean_neighbor_distance(const NeighborIndex& index, PointIndex point, std::size_t k);

/// ratio = d_a / S_s; ratio <= threshold keeps the point as wood B, else leaf B.
Partition knn_refine(const LabeledCloud& cloud, std::span<const PointIndex> wood_a, const SpacingModel& spacing,
                     std::size_t k, double ratio_threshold);

/// Points a voxel of the given size at distance d_v from the scanner should hold:
/// (Z / (d_v theta)) * (sqrt(X^2 + Y^2) / (d_v theta)).
double expected_voxel_count(Vec3 voxel_size, double d_v, double angular_step);

struct VoxelDensityRecord {
  std::uint64_t key = 0;
  std::size_t actual = 0;   // Num_r
  double expected = 0.0;    // Num_s
  double ratio = 0.0;       // R = Num_r / Num_s
  bool isolated = false;    // no occupied voxel among the 26 neighbours
};

/// One record per occupied voxel of `grid`, ascending by key.
std::vector<VoxelDensityRecord> voxel_density_records(const VoxelGrid& grid, double angular_step);

/// Voxels with ratio < threshold or with no occupied 26-neighbour are leaf voxels;
/// their points form leaf C, the rest of wood B forms wood C.
Partition voxel_refine(const LabeledCloud& cloud, std::span<const PointIndex> wood_b, const VoxelGrid& grid,
                       double angular_step, double ratio_threshold);

}  // namespace woodleaf

#include "woodleaf/geometry_refine.hpp"

#include <algorithm>
#include <cmath>

namespace woodleaf {

SpacingModel::SpacingModel(double theta) : angular_step(theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw Error(ErrorCode::InvalidArgument, "angular step must be finite and > 0");
  }
}

double SpacingModel::spacing_at(const Point& p) const {
  const double range = p.range();
  if (!(range > 0.0)) throw Error(ErrorCode::InvalidArgument, "point coincides with the scanner position");
  return range * angular_step;
}

double mean_neighbor_distance(const NeighborIndex& index, PointIndex point, std::size_t k) {
  if (index.size() < 2) throw Error(ErrorCode::InvalidArgument, "mean neighbour distance needs >= 2 indexed points");
  const auto neighbors = index.k_nearest(point, k);
  double sum = 0.0;
  for (const auto& n : neighbors) sum += n.distance;
  return sum / static_cast<double>(neighbors.size());
}

Partition knn_refine(const LabeledCloud& cloud, std::span<const PointIndex> wood_a, const SpacingModel& spacing,
                     std::size_t k, double ratio_threshold) {
  if (wood_a.empty()) throw Error(ErrorCode::InvalidArgument, "k-NN refinement needs a non-empty wood set");
  Partition out;
  if (wood_a.size() == 1) {
    // No neighbours to measure against; a lone point cannot be judged sparse.
    out.wood.assign(wood_a.begin(), wood_a.end());
    return out;
  }
  const NeighborIndex index(cloud.points, wood_a);
  std::vector<Neighbor> scratch;
  for (PointIndex p : wood_a) {
    index.k_nearest(p, k, scratch);
    double sum = 0.0;
    for (const auto& n : scratch) sum += n.distance;
    const double mean = sum / static_cast<double>(scratch.size());
    const double ratio = mean / spacing.spacing_at(cloud.points[p]);
    (ratio <= ratio_threshold ? out.wood : out.leaf).push_back(p);
  }
  return out;
}

double expected_voxel_count(Vec3 size, double d_v, double angular_step) {
  if (!(d_v > 0.0)) throw Error(ErrorCode::InvalidArgument, "voxel centre coincides with the scanner position");
  const double step = d_v * angular_step;
  return (size.z / step) * (std::sqrt(size.x * size.x + size.y * size.y) / step);
}

std::vector<VoxelDensityRecord> voxel_density_records(const VoxelGrid& grid, double angular_step) {
  const auto& buckets = grid.buckets();
  std::vector<VoxelDensityRecord> records(buckets.voxel_count());
  for (std::size_t i = 0; i < buckets.voxel_count(); ++i) {
    auto& r = records[i];
    r.key = buckets.key(i);
    const VoxelIndex v = grid.unkey(r.key);
    r.actual = buckets.bucket(i).size();
    r.expected = expected_voxel_count(grid.voxel_size(), grid.center(v).norm(), angular_step);
    r.ratio = static_cast<double>(r.actual) / r.expected;
    r.isolated = true;
    for (const VoxelIndex& u : grid.neighbors(v, NeighborMode::Cube3x3x3)) {
      if (buckets.find(grid.key(u)) >= 0) {
        r.isolated = false;
        break;
      }
    }
  }
  return records;
}

Partition voxel_refine(const LabeledCloud& cloud, std::span<const PointIndex> wood_b, const VoxelGrid& grid,
                       double angular_step, double ratio_threshold) {
  const auto& buckets = grid.buckets();
  if (buckets.point_count() != wood_b.size()) {
    throw Error(ErrorCode::InvalidArgument, "voxel grid must be populated with exactly the wood B points");
  }
  (void)cloud;
  Partition out;
  const auto records = voxel_density_records(grid, angular_step);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const bool leaf_voxel = records[i].ratio < ratio_threshold || records[i].isolated;
    const auto members = buckets.bucket(i);
    auto& dst = leaf_voxel ? out.leaf : out.wood;
    dst.insert(dst.end(), members.begin(), members.end());
  }
  std::sort(out.wood.begin(), out.wood.end());
  std::sort(out.leaf.begin(), out.leaf.end());
  return out;
}

}  // namespace woodleaf

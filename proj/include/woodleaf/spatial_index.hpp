// Spatial substrates: an exact k-d tree over a point subset and an axis-aligned
// voxel partition of the cloud's bounding box.
#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include "woodleaf/types.hpp"

namespace woodleaf {

struct Neighbor {
  PointIndex index;
  double distance;
};

/// Static k-d tree over a subset of a cloud's points. Queries are exact; equal
/// distances are ordered by ascending point index.
class NeighborIndex {
 public:
  NeighborIndex(std::span<const Point> points, std::span<const PointIndex> subset);

  std::size_t size() const { return order_.size(); }
  bool contains(PointIndex point) const;

  /// The min(k, size-1) nearest indexed points to `query`, excluding `query` itself.
  std::vector<Neighbor> k_nearest(PointIndex query, std::size_t k) const;
  /// As above, reusing `out`'s storage.
  void k_nearest(PointIndex query, std::size_t k, std::vector<Neighbor>& out) const;

  /// Indexed points within `radius` (inclusive) of `center`, ascending by index.
  std::vector<PointIndex> within_radius(Vec3 center, double radius) const;

 private:
  struct Node {
    float lo[3], hi[3];  // bounding box, rounded outward
    std::uint32_t begin, end;
    std::uint32_t left = 0, right = 0;  // 0 means leaf
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end);
  template <class Visit>
  void search(Vec3 q, double& bound2, Visit&& visit) const;

  std::vector<PointIndex> order_;           // point indices in tree order
  std::vector<std::array<double, 3>> pos_;  // positions in tree order
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> slot_;  // point index -> position in order_, or kAbsent
  static constexpr std::uint32_t kAbsent = 0xffffffffu;
};

struct VoxelIndex {
  int ix = 0, iy = 0, iz = 0;
  auto operator<=>(const VoxelIndex&) const = default;
};

enum class NeighborMode { SameLayer3x3, Cube3x3x3 };

/// Point-index lists keyed by voxel, stored compactly (sorted keys + offsets).
class VoxelBuckets {
 public:
  std::size_t voxel_count() const { return keys_.size(); }
  std::size_t point_count() const { return members_.size(); }
  /// i-th occupied voxel in ascending key order (iz major, then iy, then ix).
  std::uint64_t key(std::size_t i) const { return keys_[i]; }
  std::span<const PointIndex> bucket(std::size_t i) const {
    return {members_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  /// Slot of an occupied voxel, or -1 when empty.
  std::ptrdiff_t find(std::uint64_t key) const;
  std::span<const PointIndex> points_in(std::uint64_t key) const;

 private:
  friend class VoxelGrid;
  std::vector<std::uint64_t> keys_;
  std::vector<std::uint32_t> offsets_{0};
  std::vector<PointIndex> members_;
};

/// Equal-part partition of the full cloud's bounding box, populated with a subset.
class VoxelGrid {
 public:
  VoxelGrid(std::span<const Point> points, std::span<const PointIndex> subset, std::size_t divisions);

  std::size_t divisions() const { return divisions_; }
  Vec3 box_min() const { return min_; }
  Vec3 box_max() const { return max_; }
  Vec3 voxel_size() const { return size_; }

  VoxelIndex voxel_of(const Point& p) const;
  Vec3 center(VoxelIndex v) const;
  bool in_range(VoxelIndex v) const;
  std::uint64_t key(VoxelIndex v) const;
  VoxelIndex unkey(std::uint64_t key) const;

  /// Neighbors of `v` clipped to the grid, excluding `v`, in ascending key order.
  std::vector<VoxelIndex> neighbors(VoxelIndex v, NeighborMode mode) const;

  const VoxelBuckets& buckets() const { return buckets_; }
  /// Buckets `subset` with the same rule used at construction.
  VoxelBuckets reindex_points(std::span<const Point> points, std::span<const PointIndex> subset) const;

 private:
  std::size_t divisions_;
  Vec3 min_, max_, size_;
  VoxelBuckets buckets_;
};

}  // namespace woodleaf

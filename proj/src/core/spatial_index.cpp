#include "woodleaf/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace woodleaf {
namespace {

constexpr std::uint32_t kLeafSize = 12;
constexpr double kDegeneratePad = 1e-6;

struct Candidate {
  double d2;
  PointIndex index;
  bool operator<(const Candidate& o) const { return d2 < o.d2 || (d2 == o.d2 && index < o.index); }
};

double box_distance2(const float lo[3], const float hi[3], Vec3 q) {
  const double c[3] = {q.x, q.y, q.z};
  double d2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    double d = 0.0;
    if (c[a] < lo[a]) {
      d = lo[a] - c[a];
    } else if (c[a] > hi[a]) {
      d = c[a] - hi[a];
    }
    d2 += d * d;
  }
  return d2;
}

}  // namespace

NeighborIndex::NeighborIndex(std::span<const Point> points, std::span<const PointIndex> subset) {
  if (subset.empty()) throw Error(ErrorCode::InvalidArgument, "cannot index an empty point subset");
  order_.assign(subset.begin(), subset.end());
  std::sort(order_.begin(), order_.end());
  order_.erase(std::unique(order_.begin(), order_.end()), order_.end());
  if (order_.back() >= points.size()) throw Error(ErrorCode::InvalidArgument, "subset index out of range");

  pos_.resize(order_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) {
    const Point& p = points[order_[i]];
    pos_[i] = {p.x, p.y, p.z};
  }
  nodes_.reserve(2 * order_.size() / kLeafSize + 2);
  build(0, static_cast<std::uint32_t>(order_.size()));

  slot_.assign(points.size(), kAbsent);
  for (std::size_t i = 0; i < order_.size(); ++i) slot_[order_[i]] = static_cast<std::uint32_t>(i);
}

std::uint32_t NeighborIndex::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back({});
  double lo[3] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity()};
  double hi[3] = {-lo[0], -lo[1], -lo[2]};
  for (std::uint32_t i = begin; i < end; ++i) {
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], pos_[i][a]);
      hi[a] = std::max(hi[a], pos_[i][a]);
    }
  }
  {
    Node& n = nodes_[id];
    for (int a = 0; a < 3; ++a) {
      n.lo[a] = std::nextafter(static_cast<float>(lo[a]), -std::numeric_limits<float>::infinity());
      n.hi[a] = std::nextafter(static_cast<float>(hi[a]), std::numeric_limits<float>::infinity());
    }
    n.begin = begin;
    n.end = end;
  }
  if (end - begin <= kLeafSize) return id;

  int axis = 0;
  for (int a = 1; a < 3; ++a) {
    if (hi[a] - lo[a] > hi[axis] - lo[axis]) axis = a;
  }
  const std::uint32_t mid = begin + (end - begin) / 2;
  // Permute positions and indices together through an index vector.
  std::vector<std::uint32_t> perm(end - begin);
  std::iota(perm.begin(), perm.end(), begin);
  std::nth_element(perm.begin(), perm.begin() + (mid - begin), perm.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return pos_[a][axis] < pos_[b][axis]; });
  std::vector<std::array<double, 3>> pos_tmp(perm.size());
  std::vector<PointIndex> ord_tmp(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    pos_tmp[i] = pos_[perm[i]];
    ord_tmp[i] = order_[perm[i]];
  }
  std::copy(pos_tmp.begin(), pos_tmp.end(), pos_.begin() + begin);
  std::copy(ord_tmp.begin(), ord_tmp.end(), order_.begin() + begin);

  const std::uint32_t left = build(begin, mid);
  const std::uint32_t right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

template <class Visit>
void NeighborIndex::search(Vec3 q, double& bound2, Visit&& visit) const {
  std::uint32_t stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& n = nodes_[stack[--top]];
    if (box_distance2(n.lo, n.hi, q) > bound2) continue;
    if (n.left == 0) {
      for (std::uint32_t i = n.begin; i < n.end; ++i) {
        const double dx = pos_[i][0] - q.x, dy = pos_[i][1] - q.y, dz = pos_[i][2] - q.z;
        visit(i, dx * dx + dy * dy + dz * dz);
      }
      continue;
    }
    // Push the farther child first so the nearer one is explored first.
    const double dl = box_distance2(nodes_[n.left].lo, nodes_[n.left].hi, q);
    const double dr = box_distance2(nodes_[n.right].lo, nodes_[n.right].hi, q);
    if (dl <= dr) {
      stack[top++] = n.right;
      stack[top++] = n.left;
    } else {
      stack[top++] = n.left;
      stack[top++] = n.right;
    }
  }
}

bool NeighborIndex::contains(PointIndex point) const {
  return point < slot_.size() && slot_[point] != kAbsent;
}

std::vector<Neighbor> NeighborIndex::k_nearest(PointIndex query, std::size_t k) const {
  std::vector<Neighbor> out;
  k_nearest(query, k, out);
  return out;
}

void NeighborIndex::k_nearest(PointIndex query, std::size_t k, std::vector<Neighbor>& out) const {
  if (!contains(query)) {
    throw Error(ErrorCode::InvalidArgument, "query point " + std::to_string(query) + " is not indexed");
  }
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  out.clear();
  const std::size_t want = std::min(k, order_.size() - 1);
  if (want == 0) return;

  const auto& qp = pos_[slot_[query]];
  const Vec3 q{qp[0], qp[1], qp[2]};
  // Max-heap on (d2, index); the top is the current worst candidate.
  std::vector<Candidate> heap;
  heap.reserve(want + 1);
  double bound2 = std::numeric_limits<double>::infinity();
  search(q, bound2, [&](std::uint32_t slot, double d2) {
    const PointIndex idx = order_[slot];
    if (idx == query) return;
    const Candidate c{d2, idx};
    if (heap.size() < want) {
      heap.push_back(c);
      std::push_heap(heap.begin(), heap.end());
      if (heap.size() == want) bound2 = heap.front().d2;
    } else if (c < heap.front()) {
      std::pop_heap(heap.begin(), heap.end());
      heap.back() = c;
      std::push_heap(heap.begin(), heap.end());
      bound2 = heap.front().d2;
    }
  });
  std::sort_heap(heap.begin(), heap.end());
  out.reserve(heap.size());
  for (const auto& c : heap) out.push_back({c.index, std::sqrt(c.d2)});
}

std::vector<PointIndex> NeighborIndex::within_radius(Vec3 center, double radius) const {
  std::vector<PointIndex> out;
  if (!(radius >= 0.0)) return out;
  double bound2 = radius * radius;
  search(center, bound2, [&](std::uint32_t slot, double d2) {
    if (d2 <= radius * radius) out.push_back(order_[slot]);
  });
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------- voxels

std::ptrdiff_t VoxelBuckets::find(std::uint64_t key) const {
  auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) return -1;
  return it - keys_.begin();
}

std::span<const PointIndex> VoxelBuckets::points_in(std::uint64_t key) const {
  const auto slot = find(key);
  if (slot < 0) return {};
  return bucket(static_cast<std::size_t>(slot));
}

VoxelGrid::VoxelGrid(std::span<const Point> points, std::span<const PointIndex> subset, std::size_t divisions)
    : divisions_(divisions) {
  if (points.empty() || subset.empty()) throw Error(ErrorCode::InvalidArgument, "cannot voxelize an empty subset");
  if (divisions < 1 || divisions > (std::size_t{1} << 21)) {
    throw Error(ErrorCode::InvalidArgument, "voxel divisions must be in [1, 2^21]");
  }
  const double inf = std::numeric_limits<double>::infinity();
  min_ = {inf, inf, inf};
  max_ = {-inf, -inf, -inf};
  for (const Point& p : points) {
    min_ = {std::min(min_.x, p.x), std::min(min_.y, p.y), std::min(min_.z, p.z)};
    max_ = {std::max(max_.x, p.x), std::max(max_.y, p.y), std::max(max_.z, p.z)};
  }
  if (max_.x == min_.x) max_.x = min_.x + kDegeneratePad;
  if (max_.y == min_.y) max_.y = min_.y + kDegeneratePad;
  if (max_.z == min_.z) max_.z = min_.z + kDegeneratePad;
  const double d = static_cast<double>(divisions_);
  size_ = {(max_.x - min_.x) / d, (max_.y - min_.y) / d, (max_.z - min_.z) / d};
  buckets_ = reindex_points(points, subset);
}

VoxelIndex VoxelGrid::voxel_of(const Point& p) const {
  const auto cell = [&](double v, double lo, double size) {
    const double f = std::floor((v - lo) / size);
    const double last = static_cast<double>(divisions_ - 1);
    return static_cast<int>(std::clamp(f, 0.0, last));
  };
  return {cell(p.x, min_.x, size_.x), cell(p.y, min_.y, size_.y), cell(p.z, min_.z, size_.z)};
}

Vec3 VoxelGrid::center(VoxelIndex v) const {
  return {min_.x + (v.ix + 0.5) * size_.x, min_.y + (v.iy + 0.5) * size_.y, min_.z + (v.iz + 0.5) * size_.z};
}

bool VoxelGrid::in_range(VoxelIndex v) const {
  const auto n = static_cast<int>(divisions_);
  return v.ix >= 0 && v.iy >= 0 && v.iz >= 0 && v.ix < n && v.iy < n && v.iz < n;
}

std::uint64_t VoxelGrid::key(VoxelIndex v) const {
  const auto n = static_cast<std::uint64_t>(divisions_);
  return (static_cast<std::uint64_t>(v.iz) * n + static_cast<std::uint64_t>(v.iy)) * n +
         static_cast<std::uint64_t>(v.ix);
}

VoxelIndex VoxelGrid::unkey(std::uint64_t key) const {
  const auto n = static_cast<std::uint64_t>(divisions_);
  return {static_cast<int>(key % n), static_cast<int>((key / n) % n), static_cast<int>(key / (n * n))};
}

std::vector<VoxelIndex> VoxelGrid::neighbors(VoxelIndex v, NeighborMode mode) const {
  if (!in_range(v)) throw Error(ErrorCode::InvalidArgument, "voxel index outside the grid");
  std::vector<VoxelIndex> out;
  out.reserve(26);
  const int dz_lo = mode == NeighborMode::Cube3x3x3 ? -1 : 0;
  const int dz_hi = mode == NeighborMode::Cube3x3x3 ? 1 : 0;
  for (int dz = dz_lo; dz <= dz_hi; ++dz) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        const VoxelIndex u{v.ix + dx, v.iy + dy, v.iz + dz};
        if (in_range(u)) out.push_back(u);
      }
    }
  }
  return out;
}

VoxelBuckets VoxelGrid::reindex_points(std::span<const Point> points, std::span<const PointIndex> subset) const {
  std::vector<std::pair<std::uint64_t, PointIndex>> keyed;
  keyed.reserve(subset.size());
  for (PointIndex i : subset) {
    if (i >= points.size()) throw Error(ErrorCode::InvalidArgument, "subset index out of range");
    keyed.emplace_back(key(voxel_of(points[i])), i);
  }
  std::sort(keyed.begin(), keyed.end());
  VoxelBuckets b;
  b.members_.reserve(keyed.size());
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    if (i == 0 || keyed[i].first != keyed[i - 1].first) {
      if (i > 0) b.offsets_.push_back(static_cast<std::uint32_t>(i));
      b.keys_.push_back(keyed[i].first);
    }
    b.members_.push_back(keyed[i].second);
  }
  if (!keyed.empty()) b.offsets_.push_back(static_cast<std::uint32_t>(keyed.size()));
  return b;
}

}  // namespace woodleaf

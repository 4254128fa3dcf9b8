#include "woodleaf/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <optional>

#include "woodleaf/geometry_refine.hpp"
#include "woodleaf/spatial_index.hpp"
#include "woodleaf/wood_verify.hpp"

namespace woodleaf {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Order of points sorted by (x, y, z, intensity); running every stage in this
/// order makes index tie-breaks depend on coordinates rather than file order.
std::vector<PointIndex> canonical_order(const std::vector<Point>& points) {
  std::vector<PointIndex> order(points.size());
  std::iota(order.begin(), order.end(), PointIndex{0});
  std::stable_sort(order.begin(), order.end(), [&](PointIndex a, PointIndex b) {
    const Point& p = points[a];
    const Point& q = points[b];
    if (p.x != q.x) return p.x < q.x;
    if (p.y != q.y) return p.y < q.y;
    if (p.z != q.z) return p.z < q.z;
    return p.intensity < q.intensity;
  });
  return order;
}

IndexSet to_original(const IndexSet& set, const std::vector<PointIndex>& order) {
  IndexSet out;
  out.reserve(set.size());
  for (PointIndex i : set) out.push_back(order[i]);
  std::sort(out.begin(), out.end());
  return out;
}

Partition to_original(const Partition& p, const std::vector<PointIndex>& order) {
  return {to_original(p.wood, order), to_original(p.leaf, order)};
}

IndexSet merge(std::initializer_list<const IndexSet*> sets) {
  IndexSet out;
  for (const IndexSet* s : sets) out.insert(out.end(), s->begin(), s->end());
  std::sort(out.begin(), out.end());
  return out;
}

IndexSet all_indices(std::size_t n) {
  IndexSet all(n);
  std::iota(all.begin(), all.end(), PointIndex{0});
  return all;
}

StageTrace run_stages(const LabeledCloud& cloud, const ScanConfig& scan, const PipelineParams& params) {
  StageTrace t;
  auto start = Clock::now();
  const NeighborIndex full_index(cloud.points, all_indices(cloud.size()));
  IntensityGateResult gate = run_intensity_gate(cloud, full_index, params);
  t.threshold = gate.threshold;
  t.quarters = gate.quarters;
  t.wood_spheres = gate.seeds.wood_spheres;
  t.leaf_spheres = gate.seeds.leaf_spheres;
  t.a = std::move(gate.split);
  t.seconds_intensity = seconds_since(start);

  const SpacingModel spacing(scan.angular_step);
  start = Clock::now();
  if (!t.a.wood.empty()) {
    t.b = knn_refine(cloud, t.a.wood, spacing, params.k_neighbors, params.neighbor_ratio_threshold);
  }
  t.seconds_knn = seconds_since(start);

  start = Clock::now();
  std::optional<VoxelGrid> grid;
  if (!t.b.wood.empty()) {
    grid.emplace(cloud.points, t.b.wood, params.voxel_divisions);
    t.c = voxel_refine(cloud, t.b.wood, *grid, scan.angular_step, params.voxel_ratio_threshold);
  }
  t.leaf_d = merge({&t.a.leaf, &t.b.leaf, &t.c.leaf});
  t.seconds_voxel = seconds_since(start);

  start = Clock::now();
  if (grid) {
    t.final = verify_wood(cloud, t.c.wood, t.leaf_d, *grid, scan, params, t.threshold.value);
  } else {
    t.final = {{}, t.leaf_d};
  }
  t.seconds_verify = seconds_since(start);
  return t;
}

}  // namespace

ClassificationResult classify(const LabeledCloud& cloud, const ScanConfig& scan, const PipelineParams& params) {
  validate_params(params);
  validate_scan_config(scan);
  if (cloud.points.empty()) throw Error(ErrorCode::InvalidArgument, "cannot classify an empty cloud");
  if (cloud.points.size() > 0xfffffffeu) throw Error(ErrorCode::InvalidArgument, "cloud exceeds 2^32-2 points");

  const auto order = canonical_order(cloud.points);
  LabeledCloud sorted;
  sorted.origin = cloud.origin;
  sorted.points.reserve(cloud.size());
  for (PointIndex i : order) sorted.points.push_back(cloud.points[i]);
  sorted.labels.assign(cloud.size(), ClassLabel::Unassigned);

  StageTrace t = run_stages(sorted, scan, params);

  ClassificationResult result;
  result.trace = t;
  result.trace.a = to_original(t.a, order);
  result.trace.b = to_original(t.b, order);
  result.trace.c = to_original(t.c, order);
  result.trace.leaf_d = to_original(t.leaf_d, order);
  result.trace.final = to_original(t.final, order);
  result.labels.assign(cloud.size(), ClassLabel::Unassigned);
  for (PointIndex i : result.trace.final.wood) result.labels[i] = ClassLabel::Wood;
  for (PointIndex i : result.trace.final.leaf) result.labels[i] = ClassLabel::Leaf;
  return result;
}

std::string format_trace(const StageTrace& t) {
  char buf[1024];
  const auto n = [](const auto& set) { return static_cast<unsigned long long>(set.size()); };
  std::snprintf(buf, sizeof buf,
                "%-14s %14s %14s %14s %14s %14s\n"
                "%-14s %14llu %14llu %14llu %14s %14llu\n"
                "%-14s %14llu %14llu %14llu %14llu %14llu\n"
                "intensity threshold %.6g (%s)\n"
                "promotions %llu\n"
                "time / ms: intensity %.1f, knn %.1f, voxel %.1f, verify %.1f, total %.1f\n",
                "", "intensity", "knn", "voxel", "leaf D", "verified",
                "wood", n(t.a.wood), n(t.b.wood), n(t.c.wood), "", n(t.final.wood),
                "leaf", n(t.a.leaf), n(t.b.leaf), n(t.c.leaf), n(t.leaf_d), n(t.final.leaf),
                t.threshold.value,
                t.threshold.provenance == ThresholdProvenance::CurveIntersection ? "curve intersection"
                                                                                 : "midpoint fallback",
                static_cast<unsigned long long>(t.promotions()), t.seconds_intensity * 1e3, t.seconds_knn * 1e3,
                t.seconds_voxel * 1e3, t.seconds_verify * 1e3, t.seconds_total() * 1e3);
  return buf;
}

double estimate_angular_step(const LabeledCloud& cloud, const PipelineParams& params) {
  validate_params(params);
  if (cloud.size() < 2) throw Error(ErrorCode::InvalidArgument, "angular step estimate needs at least 2 points");
  const NeighborIndex index(cloud.points, all_indices(cloud.size()));
  const auto samples = sample_spheres(cloud, index, params.n_seeds, params.sphere_radius, params.rng_seed);
  std::vector<double> densities;
  for (const auto& s : samples) {
    if (s.usable) densities.push_back(s.projection_density);
  }
  IndexSet candidates;
  if (!densities.empty()) {
    try {
      candidates = select_seed_classes(samples, quarter_thresholds(densities)).wood;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyClass) throw;
    }
  }
  if (candidates.empty()) {
    for (const auto& s : samples) {
      if (s.usable) candidates.insert(candidates.end(), s.members.begin(), s.members.end());
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  }
  std::vector<double> ratios;
  for (PointIndex p : candidates) {
    const double range = cloud.points[p].range();
    const auto nn = index.k_nearest(p, 1);
    if (range > 0.0 && !nn.empty() && nn.front().distance > 0.0) ratios.push_back(nn.front().distance / range);
  }
  if (ratios.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "too few sampled points to estimate the angular step");
  }
  const auto mid = ratios.begin() + static_cast<std::ptrdiff_t>(ratios.size() / 2);
  std::nth_element(ratios.begin(), mid, ratios.end());
  return *mid;
}

}  // namespace woodleaf

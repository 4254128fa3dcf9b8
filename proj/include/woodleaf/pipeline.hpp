// Full classification flow: intensity gate -> k-NN refine -> voxel refine ->
// leaf union -> wood verification, with per-stage bookkeeping.
#pragma once

#include <string>

#include "woodleaf/intensity_gate.hpp"
#include "woodleaf/types.hpp"

namespace woodleaf {

struct StageTrace {
  Partition a;      // intensity split
  Partition b;      // k-NN split of a.wood
  Partition c;      // voxel split of b.wood
  IndexSet leaf_d;  // a.leaf + b.leaf + c.leaf
  Partition final;  // after verification

  IntensityThreshold threshold;
  DensityQuarters quarters{};
  std::size_t wood_spheres = 0;
  std::size_t leaf_spheres = 0;

  double seconds_intensity = 0.0;
  double seconds_knn = 0.0;
  double seconds_voxel = 0.0;
  double seconds_verify = 0.0;
  double seconds_total() const { return seconds_intensity + seconds_knn + seconds_voxel + seconds_verify; }
  std::size_t promotions() const { return final.wood.size() - c.wood.size(); }
};

struct ClassificationResult {
  std::vector<ClassLabel> labels;  // in the caller's point order
  StageTrace trace;                // indices in the caller's point order
};

/// Labels every point Wood or Leaf. Deterministic under params.rng_seed and
/// independent of input point order. Throws Error(EmptyClass) when sphere
/// sampling cannot find both materials.
ClassificationResult classify(const LabeledCloud& cloud, const ScanConfig& scan, const PipelineParams& params);

/// Stage counts laid out like a wood/leaf bookkeeping table.
std::string format_trace(const StageTrace& trace);

/// Median over wood-candidate sphere members of nearest-neighbour distance / range.
/// Scale-free when sphere_radius scales with the cloud.
double estimate_angular_step(const LabeledCloud& cloud, const PipelineParams& params);

}  // namespace woodleaf

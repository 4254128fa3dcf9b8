// First classification step: sphere sampling, projection-density quartering and
// an adaptive intensity threshold that splits the cloud into wood A / leaf A.
#pragma once

#include <utility>

#include "woodleaf/spatial_index.hpp"
#include "woodleaf/types.hpp"

namespace woodleaf {

/// Spheres with fewer members than this carry no usable density.
inline constexpr std::size_t kMinUsableMembers = 5;
/// Floor on the projected hull area, in m^2.
inline constexpr double kMinHullArea = 1e-6;

struct SphereSample {
  PointIndex seed = 0;
  IndexSet members;  // includes the seed
  double projection_density = 0.0;
  bool usable = false;
};

/// Draws `n_seeds` seed points (without replacement unless n_seeds exceeds the
/// cloud size) and collects every point within `radius` of each seed.
/// `full_index` must index the whole cloud.
std::vector<SphereSample> sample_spheres(const LabeledCloud& cloud, const NeighborIndex& full_index,
                                         std::size_t n_seeds, double radius, std::uint64_t rng_seed);
std::vector<SphereSample> sample_spheres(const LabeledCloud& cloud, std::size_t n_seeds, double radius,
                                         std::uint64_t rng_seed);

/// Area of the convex hull of 2D points (shoelace over Andrew's monotone chain).
double convex_hull_area(std::vector<std::array<double, 2>> xy);

/// Member count over the area of the members' horizontal-projection hull.
double projection_density(const SphereSample& sample, const LabeledCloud& cloud);

struct DensityQuarters {
  double quarter;        // rho_min + (rho_max - rho_min) / 4
  double three_quarter;  // rho_max - (rho_max - rho_min) / 4
};
DensityQuarters quarter_thresholds(std::span<const double> densities);

struct SeedClasses {
  IndexSet wood;  // members of spheres denser than three_quarter
  IndexSet leaf;  // members of spheres sparser than quarter
  std::size_t wood_spheres = 0;
  std::size_t leaf_spheres = 0;
};

/// Throws Error(EmptyClass) when either side ends up with no spheres or points.
SeedClasses select_seed_classes(std::span<const SphereSample> samples, DensityQuarters quarters);

enum class ThresholdProvenance { CurveIntersection, MidpointFallback };

struct IntensityThreshold {
  double value = 0.0;
  ThresholdProvenance provenance = ThresholdProvenance::CurveIntersection;
  bool peaks_swapped = false;  // leaf curve peaked at a higher intensity than wood
};

inline constexpr std::size_t kHistogramBins = 100;
inline constexpr std::size_t kSmoothingWindow = 5;

/// Crossing of the two smoothed, normalized intensity histograms between their
/// peaks; midpoint of the sample means when the curves do not cross there.
IntensityThreshold fit_intensity_threshold(std::span<const double> wood_intensities,
                                           std::span<const double> leaf_intensities);

/// intensity >= threshold goes to wood.
Partition classify_by_intensity(const LabeledCloud& cloud, double threshold);

struct IntensityGateResult {
  IntensityThreshold threshold;
  DensityQuarters quarters{};
  SeedClasses seeds;
  Partition split;  // wood A / leaf A
};

IntensityGateResult run_intensity_gate(const LabeledCloud& cloud, const NeighborIndex& full_index,
                                       const PipelineParams& params);

}  // namespace woodleaf

// Synthetic terrestrial scan of a stylised tree with ground-truth labels.
//
// The scanner sits at the origin and fires rays on a regular azimuth/elevation
// grid with step `angular_step`. The tree stands `scanner_distance` metres away
// along +x with its base `scanner_height` below the scanner. Wood is a tapered
// trunk plus inclined branches (cylinder segments), foliage is flat disks.
// Every primitive keeps its own front-facing hits; occlusion is not modelled.
#pragma once

#include <cstdint>
#include <vector>

#include "woodleaf/types.hpp"

namespace woodleaf {

struct SyntheticTreeSpec {
  double tree_height = 12.0;             // ground to canopy top, m
  double trunk_height_fraction = 0.75;   // trunk length / tree height
  double trunk_radius = 0.09;            // at the base, m
  double trunk_top_radius = 0.035;       // m
  std::size_t branch_count = 30;
  double branch_min_inclination_deg = 20.0;  // from vertical
  double branch_max_inclination_deg = 45.0;
  double branch_min_length = 0.5;        // m
  double branch_max_length = 1.0;
  double branch_radius = 0.02;           // at the trunk, m
  double branch_tip_radius = 0.012;
  std::size_t leaf_count = 1100;
  double leaf_radius = 0.05;             // disk radius, m
  double canopy_base_fraction = 0.45;    // lowest foliage height / tree height
  double canopy_radius = 2.0;            // horizontal semi-axis of the foliage ellipsoid, m
  double leaf_clearance = 0.08;          // minimum gap between a disk and any wood surface, m
  double scanner_distance = 15.0;        // horizontal distance to the trunk axis, m
  double scanner_height = 1.5;           // scanner above the tree base, m
  double angular_step = 3.49e-4;         // rad, ~0.02 deg
  double wood_intensity_mean = 60.0;
  double wood_intensity_spread = 8.0;    // standard deviation
  double leaf_intensity_mean = 35.0;
  double leaf_intensity_spread = 8.0;
  double leaf_jitter = 0.01;             // per-axis uniform amplitude, m
  std::uint64_t rng_seed = 42;
};

enum class TreePart : std::uint8_t { Trunk, Branch, Leaf };

struct SyntheticTree {
  LabeledCloud cloud;          // scanner-centred, labels are ground truth
  std::vector<TreePart> part;  // generating primitive class per point
};

/// Throws Error(InvalidArgument) naming the first offending field.
void validate_spec(const SyntheticTreeSpec& spec);

SyntheticTree generate_tree(const SyntheticTreeSpec& spec);

/// The fixed ~200k-point tree used by the end-to-end checks.
SyntheticTreeSpec default_acceptance_tree();

}  // namespace woodleaf

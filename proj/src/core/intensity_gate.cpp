#include "woodleaf/intensity_gate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace woodleaf {

std::vector<SphereSample> sample_spheres(const LabeledCloud& cloud, const NeighborIndex& full_index,
                                         std::size_t n_seeds, double radius, std::uint64_t rng_seed) {
  const std::size_t n = cloud.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "cannot sample an empty cloud");
  if (n_seeds < 1) throw Error(ErrorCode::InvalidArgument, "n_seeds must be >= 1");
  if (full_index.size() != n) throw Error(ErrorCode::InvalidArgument, "sphere sampling needs a full-cloud index");

  std::mt19937_64 rng(rng_seed);
  std::vector<PointIndex> seeds;
  seeds.reserve(n_seeds);
  if (n_seeds <= n) {
    // Partial Fisher-Yates: the first n_seeds slots become a uniform sample.
    std::vector<PointIndex> pool(n);
    std::iota(pool.begin(), pool.end(), PointIndex{0});
    for (std::size_t i = 0; i < n_seeds; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(pool[i], pool[pick(rng)]);
      seeds.push_back(pool[i]);
    }
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t i = 0; i < n_seeds; ++i) seeds.push_back(static_cast<PointIndex>(pick(rng)));
  }

  std::vector<SphereSample> samples(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    SphereSample& s = samples[i];
    s.seed = seeds[i];
    s.members = full_index.within_radius(cloud.points[s.seed].position(), radius);
    s.usable = s.members.size() >= kMinUsableMembers;
    s.projection_density = projection_density(s, cloud);
  }
  return samples;
}

std::vector<SphereSample> sample_spheres(const LabeledCloud& cloud, std::size_t n_seeds, double radius,
                                         std::uint64_t rng_seed) {
  IndexSet all(cloud.size());
  std::iota(all.begin(), all.end(), PointIndex{0});
  const NeighborIndex index(cloud.points, all);
  return sample_spheres(cloud, index, n_seeds, radius, rng_seed);
}

double convex_hull_area(std::vector<std::array<double, 2>> xy) {
  if (xy.size() < 3) return 0.0;
  std::sort(xy.begin(), xy.end());
  xy.erase(std::unique(xy.begin(), xy.end()), xy.end());
  if (xy.size() < 3) return 0.0;
  const auto cross = [](const std::array<double, 2>& o, const std::array<double, 2>& a,
                        const std::array<double, 2>& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  std::vector<std::array<double, 2>> hull(2 * xy.size());
  std::size_t k = 0;
  for (const auto& p : xy) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = xy.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], xy[i]) <= 0) --k;
    hull[k++] = xy[i];
  }
  hull.resize(k - 1);
  double twice = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    twice += a[0] * b[1] - b[0] * a[1];
  }
  return std::abs(twice) / 2.0;
}

double projection_density(const SphereSample& sample, const LabeledCloud& cloud) {
  if (sample.members.empty()) return 0.0;
  std::vector<std::array<double, 2>> xy;
  xy.reserve(sample.members.size());
  for (PointIndex i : sample.members) xy.push_back({cloud.points[i].x, cloud.points[i].y});
  const double area = std::max(convex_hull_area(std::move(xy)), kMinHullArea);
  return static_cast<double>(sample.members.size()) / area;
}

DensityQuarters quarter_thresholds(std::span<const double> densities) {
  if (densities.empty()) throw Error(ErrorCode::InvalidArgument, "no densities to quarter");
  const auto [lo, hi] = std::minmax_element(densities.begin(), densities.end());
  const double span = *hi - *lo;
  return {*lo + span / 4.0, *hi - span / 4.0};
}

SeedClasses select_seed_classes(std::span<const SphereSample> samples, DensityQuarters q) {
  SeedClasses out;
  IndexSet wood, leaf;
  for (const auto& s : samples) {
    if (!s.usable) continue;
    if (s.projection_density > q.three_quarter) {
      wood.insert(wood.end(), s.members.begin(), s.members.end());
      ++out.wood_spheres;
    } else if (s.projection_density < q.quarter) {
      leaf.insert(leaf.end(), s.members.begin(), s.members.end());
      ++out.leaf_spheres;
    }
  }
  for (auto* set : {&wood, &leaf}) {
    std::sort(set->begin(), set->end());
    set->erase(std::unique(set->begin(), set->end()), set->end());
  }
  // Points claimed by both sides are contradictory supervision.
  std::set_difference(wood.begin(), wood.end(), leaf.begin(), leaf.end(), std::back_inserter(out.wood));
  std::set_difference(leaf.begin(), leaf.end(), wood.begin(), wood.end(), std::back_inserter(out.leaf));
  if (out.wood_spheres == 0 || out.leaf_spheres == 0 || out.wood.empty() || out.leaf.empty()) {
    throw Error(ErrorCode::EmptyClass,
                "sphere sampling found " + std::to_string(out.wood_spheres) + " wood and " +
                    std::to_string(out.leaf_spheres) + " leaf spheres; both materials are required");
  }
  return out;
}

namespace {

std::vector<double> smoothed_histogram(std::span<const double> values, double lo, double width) {
  std::vector<double> hist(kHistogramBins, 0.0);
  for (double v : values) {
    auto b = static_cast<std::size_t>(std::clamp(std::floor((v - lo) / width), 0.0,
                                                 static_cast<double>(kHistogramBins - 1)));
    hist[b] += 1.0;
  }
  for (double& h : hist) h /= static_cast<double>(values.size());
  // Centered moving average; the window is truncated at the ends.
  std::vector<double> smooth(kHistogramBins, 0.0);
  const auto half = static_cast<std::ptrdiff_t>(kSmoothingWindow / 2);
  const auto bins = static_cast<std::ptrdiff_t>(kHistogramBins);
  for (std::ptrdiff_t b = 0; b < bins; ++b) {
    const auto first = std::max<std::ptrdiff_t>(0, b - half);
    const auto last = std::min<std::ptrdiff_t>(bins - 1, b + half);
    double sum = 0.0;
    for (auto i = first; i <= last; ++i) sum += hist[static_cast<std::size_t>(i)];
    smooth[static_cast<std::size_t>(b)] = sum / static_cast<double>(last - first + 1);
  }
  return smooth;
}

double mean_of(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

}  // namespace

IntensityThreshold fit_intensity_threshold(std::span<const double> wood, std::span<const double> leaf) {
  if (wood.empty() || leaf.empty()) {
    throw Error(ErrorCode::InvalidArgument, "intensity threshold needs wood and leaf samples");
  }
  const auto [wlo, whi] = std::minmax_element(wood.begin(), wood.end());
  const auto [llo, lhi] = std::minmax_element(leaf.begin(), leaf.end());
  const double lo = std::min(*wlo, *llo);
  const double hi = std::max(*whi, *lhi);

  IntensityThreshold fallback;
  fallback.provenance = ThresholdProvenance::MidpointFallback;
  fallback.value = std::clamp((mean_of(wood) + mean_of(leaf)) / 2.0, lo, hi);
  if (!(hi > lo)) return fallback;

  const double width = (hi - lo) / static_cast<double>(kHistogramBins);
  const auto wood_curve = smoothed_histogram(wood, lo, width);
  const auto leaf_curve = smoothed_histogram(leaf, lo, width);
  const auto peak = [](const std::vector<double>& c) {
    return static_cast<std::size_t>(std::max_element(c.begin(), c.end()) - c.begin());
  };
  std::size_t leaf_peak = peak(leaf_curve);
  std::size_t wood_peak = peak(wood_curve);
  const bool swapped = leaf_peak > wood_peak;
  fallback.peaks_swapped = swapped;
  const std::size_t from = std::min(leaf_peak, wood_peak);
  const std::size_t to = std::max(leaf_peak, wood_peak);

  // D > 0 where the lower-peaked curve dominates; look for its first drop to <= 0.
  const auto& low_curve = swapped ? wood_curve : leaf_curve;
  const auto& high_curve = swapped ? leaf_curve : wood_curve;
  const auto diff = [&](std::size_t b) { return low_curve[b] - high_curve[b]; };
  const auto center = [&](std::size_t b) { return lo + (static_cast<double>(b) + 0.5) * width; };

  for (std::size_t b = from + 1; b <= to; ++b) {
    const double before = diff(b - 1);
    const double here = diff(b);
    if (!(before > 0.0 && here <= 0.0)) continue;
    IntensityThreshold t;
    t.peaks_swapped = swapped;
    if (here < 0.0) {
      const double frac = before / (before - here);
      t.value = center(b - 1) + frac * width;
      return t;
    }
    // A run of exact ties: take the middle of the run, provided the curves do cross after it.
    std::size_t end = b;
    while (end + 1 <= to && diff(end + 1) == 0.0) ++end;
    if (end + 1 <= to && diff(end + 1) < 0.0) {
      t.value = (center(b) + center(end)) / 2.0;
      return t;
    }
    break;
  }
  return fallback;
}

Partition classify_by_intensity(const LabeledCloud& cloud, double threshold) {
  if (!std::isfinite(threshold)) throw Error(ErrorCode::InvalidArgument, "intensity threshold is not finite");
  Partition out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    (cloud.points[i].intensity >= threshold ? out.wood : out.leaf).push_back(static_cast<PointIndex>(i));
  }
  return out;
}

IntensityGateResult run_intensity_gate(const LabeledCloud& cloud, const NeighborIndex& full_index,
                                       const PipelineParams& params) {
  IntensityGateResult r;
  const auto samples = sample_spheres(cloud, full_index, params.n_seeds, params.sphere_radius, params.rng_seed);
  std::vector<double> densities;
  for (const auto& s : samples) {
    if (s.usable) densities.push_back(s.projection_density);
  }
  if (densities.empty()) {
    throw Error(ErrorCode::EmptyClass, "no sphere sample had at least " + std::to_string(kMinUsableMembers) +
                                           " members; sphere radius too small for this cloud");
  }
  r.quarters = quarter_thresholds(densities);
  r.seeds = select_seed_classes(samples, r.quarters);
  std::vector<double> wood_i, leaf_i;
  wood_i.reserve(r.seeds.wood.size());
  leaf_i.reserve(r.seeds.leaf.size());
  for (PointIndex i : r.seeds.wood) wood_i.push_back(cloud.points[i].intensity);
  for (PointIndex i : r.seeds.leaf) leaf_i.push_back(cloud.points[i].intensity);
  r.threshold = fit_intensity_threshold(wood_i, leaf_i);
  r.split = classify_by_intensity(cloud, r.threshold.value);
  return r;
}

}  // namespace woodleaf

#include "woodleaf/synth_scanner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace woodleaf {
namespace {

constexpr double kTrunkSegment = 0.25;  // m per constant-radius trunk piece
constexpr std::size_t kBranchSegments = 3;

struct Cylinder {
  Vec3 base;     // centre of the base disc
  Vec3 axis;     // unit
  double length;
  double radius;
  TreePart part;
};

struct Disk {
  Vec3 center;
  Vec3 normal;  // unit
  double radius;
};

struct AngularBox {
  double az_lo, az_hi, el_lo, el_hi;
};

Vec3 unit(Vec3 v) { return (1.0 / v.norm()) * v; }

/// Azimuth/elevation bounds of an axis-aligned box that does not straddle the z axis.
AngularBox angular_box(Vec3 lo, Vec3 hi) {
  AngularBox b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
               0.0, 0.0};
  double rho_max = 0.0;
  for (double x : {lo.x, hi.x}) {
    for (double y : {lo.y, hi.y}) {
      const double az = std::atan2(y, x);
      b.az_lo = std::min(b.az_lo, az);
      b.az_hi = std::max(b.az_hi, az);
      rho_max = std::max(rho_max, std::hypot(x, y));
    }
  }
  const double cx = std::clamp(0.0, lo.x, hi.x);
  const double cy = std::clamp(0.0, lo.y, hi.y);
  const double rho_min = std::hypot(cx, cy);
  b.el_lo = std::atan2(lo.z, lo.z < 0 ? rho_min : rho_max);
  b.el_hi = std::atan2(hi.z, hi.z > 0 ? rho_min : rho_max);
  return b;
}

/// Calls visit(direction) for every grid ray inside the box.
template <class Visit>
void for_each_ray(const AngularBox& box, double step, Visit&& visit) {
  const auto j0 = static_cast<long>(std::ceil(box.az_lo / step));
  const auto j1 = static_cast<long>(std::floor(box.az_hi / step));
  const auto i0 = static_cast<long>(std::ceil(box.el_lo / step));
  const auto i1 = static_cast<long>(std::floor(box.el_hi / step));
  for (long i = i0; i <= i1; ++i) {
    const double el = static_cast<double>(i) * step;
    const double ce = std::cos(el), se = std::sin(el);
    for (long j = j0; j <= j1; ++j) {
      const double az = static_cast<double>(j) * step;
      visit(Vec3{ce * std::cos(az), ce * std::sin(az), se});
    }
  }
}

AngularBox cylinder_box(const Cylinder& c) {
  const Vec3 top = c.base + c.length * c.axis;
  const double r = c.radius;
  return angular_box({std::min(c.base.x, top.x) - r, std::min(c.base.y, top.y) - r, std::min(c.base.z, top.z) - r},
                     {std::max(c.base.x, top.x) + r, std::max(c.base.y, top.y) + r, std::max(c.base.z, top.z) + r});
}

/// Nearest hit of a ray from the origin on the cylinder's side wall.
bool hit_cylinder(const Cylinder& c, Vec3 d, Vec3& out) {
  const Vec3 m = d - d.dot(c.axis) * c.axis;
  const Vec3 oc = Vec3{} - c.base;
  const Vec3 n = oc - oc.dot(c.axis) * c.axis;
  const double a = m.dot(m);
  const double b = 2.0 * m.dot(n);
  const double cc = n.dot(n) - c.radius * c.radius;
  const double disc = b * b - 4.0 * a * cc;
  if (a < 1e-15 || disc < 0.0) return false;
  const double t = (-b - std::sqrt(disc)) / (2.0 * a);
  if (t <= 0.0) return false;
  const Vec3 p = t * d;
  const double s = (p - c.base).dot(c.axis);
  if (s < 0.0 || s > c.length) return false;
  out = p;
  return true;
}

bool hit_disk(const Disk& k, Vec3 d, Vec3& out) {
  const double denom = k.normal.dot(d);
  if (std::abs(denom) < 1e-9) return false;
  const double t = k.normal.dot(k.center) / denom;
  if (t <= 0.0) return false;
  const Vec3 p = t * d;
  const Vec3 r = p - k.center;
  if (r.dot(r) > k.radius * k.radius) return false;
  out = p;
  return true;
}

/// Distance from point p to segment [a, b].
double segment_distance(Vec3 p, Vec3 a, Vec3 b) {
  const Vec3 ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.dot(ab), 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

class Emitter {
 public:
  Emitter(const SyntheticTreeSpec& spec, SyntheticTree& tree) : spec_(spec), tree_(tree) {}

  void add(Vec3 p, TreePart part, std::mt19937_64& rng) {
    const bool leaf = part == TreePart::Leaf;
    std::normal_distribution<double> intensity(leaf ? spec_.leaf_intensity_mean : spec_.wood_intensity_mean,
                                               leaf ? spec_.leaf_intensity_spread : spec_.wood_intensity_spread);
    if (leaf && spec_.leaf_jitter > 0.0) {
      std::uniform_real_distribution<double> jitter(-spec_.leaf_jitter, spec_.leaf_jitter);
      const double dx = jitter(rng), dy = jitter(rng), dz = jitter(rng);
      p = p + Vec3{dx, dy, dz};
    }
    tree_.cloud.points.push_back({p.x, p.y, p.z, std::max(0.0, intensity(rng))});
    tree_.cloud.labels.push_back(leaf ? ClassLabel::Leaf : ClassLabel::Wood);
    tree_.part.push_back(part);
  }

 private:
  const SyntheticTreeSpec& spec_;
  SyntheticTree& tree_;
};

}  // namespace

void validate_spec(const SyntheticTreeSpec& s) {
  const auto positive = [](const char* name, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidArgument, std::string("synthetic tree: ") + name + " must be > 0");
    }
  };
  const auto fraction = [](const char* name, double v) {
    if (!(v > 0.0 && v < 1.0)) {
      throw Error(ErrorCode::InvalidArgument, std::string("synthetic tree: ") + name + " must lie in (0, 1)");
    }
  };
  positive("tree_height", s.tree_height);
  fraction("trunk_height_fraction", s.trunk_height_fraction);
  positive("trunk_radius", s.trunk_radius);
  positive("trunk_top_radius", s.trunk_top_radius);
  positive("branch_min_length", s.branch_min_length);
  positive("branch_max_length", s.branch_max_length);
  positive("branch_radius", s.branch_radius);
  positive("branch_tip_radius", s.branch_tip_radius);
  positive("leaf_radius", s.leaf_radius);
  fraction("canopy_base_fraction", s.canopy_base_fraction);
  positive("canopy_radius", s.canopy_radius);
  positive("scanner_distance", s.scanner_distance);
  positive("angular_step", s.angular_step);
  positive("wood_intensity_spread", s.wood_intensity_spread);
  positive("leaf_intensity_spread", s.leaf_intensity_spread);
  if (!(s.leaf_clearance >= 0.0)) throw Error(ErrorCode::InvalidArgument, "synthetic tree: leaf_clearance must be >= 0");
  if (!(s.leaf_jitter >= 0.0)) throw Error(ErrorCode::InvalidArgument, "synthetic tree: leaf_jitter must be >= 0");
  if (!std::isfinite(s.scanner_height)) throw Error(ErrorCode::InvalidArgument, "synthetic tree: scanner_height");
  if (s.trunk_top_radius > s.trunk_radius) {
    throw Error(ErrorCode::InvalidArgument, "synthetic tree: trunk_top_radius exceeds trunk_radius");
  }
  if (s.branch_tip_radius > s.branch_radius) {
    throw Error(ErrorCode::InvalidArgument, "synthetic tree: branch_tip_radius exceeds branch_radius");
  }
  if (s.branch_min_length > s.branch_max_length) {
    throw Error(ErrorCode::InvalidArgument, "synthetic tree: branch_min_length exceeds branch_max_length");
  }
  if (!(s.branch_min_inclination_deg >= 0.0 && s.branch_min_inclination_deg <= s.branch_max_inclination_deg &&
        s.branch_max_inclination_deg < 90.0)) {
    throw Error(ErrorCode::InvalidArgument, "synthetic tree: branch inclination range must satisfy 0 <= min <= max < 90");
  }
  if (!(s.wood_intensity_mean > s.leaf_intensity_mean)) {
    throw Error(ErrorCode::InvalidArgument, "synthetic tree: wood intensity mean must exceed leaf intensity mean");
  }
  if (s.canopy_radius >= s.scanner_distance) {
    throw Error(ErrorCode::InvalidArgument, "synthetic tree: canopy must not reach the scanner");
  }
}

SyntheticTree generate_tree(const SyntheticTreeSpec& spec) {
  validate_spec(spec);
  std::mt19937_64 layout_rng = substream(spec.rng_seed, 0);
  const double ground = -spec.scanner_height;
  const Vec3 foot{spec.scanner_distance, 0.0, ground};
  const Vec3 up{0.0, 0.0, 1.0};
  const double trunk_length = spec.tree_height * spec.trunk_height_fraction;
  const auto trunk_radius_at = [&](double h) {
    const double f = std::clamp(h / trunk_length, 0.0, 1.0);
    return spec.trunk_radius + f * (spec.trunk_top_radius - spec.trunk_radius);
  };

  std::vector<Cylinder> wood;
  const auto trunk_pieces = static_cast<std::size_t>(std::ceil(trunk_length / kTrunkSegment));
  for (std::size_t i = 0; i < trunk_pieces; ++i) {
    const double h0 = static_cast<double>(i) * kTrunkSegment;
    const double len = std::min(kTrunkSegment, trunk_length - h0);
    wood.push_back({foot + h0 * up, up, len, trunk_radius_at(h0 + len / 2.0), TreePart::Trunk});
  }

  const double canopy_base = spec.canopy_base_fraction * spec.tree_height;
  std::uniform_real_distribution<double> unit_draw(0.0, 1.0);
  const auto draw = [&](double lo, double hi) { return lo + (hi - lo) * unit_draw(layout_rng); };
  const double deg = std::numbers::pi / 180.0;
  for (std::size_t b = 0; b < spec.branch_count; ++b) {
    const double h = draw(std::min(canopy_base, 0.9 * trunk_length), 0.95 * trunk_length);
    const double azimuth = draw(0.0, 2.0 * std::numbers::pi);
    const double incl = draw(spec.branch_min_inclination_deg, spec.branch_max_inclination_deg) * deg;
    const double length = draw(spec.branch_min_length, spec.branch_max_length);
    const Vec3 out{std::cos(azimuth), std::sin(azimuth), 0.0};
    const Vec3 axis = unit(Vec3{std::sin(incl) * out.x, std::sin(incl) * out.y, std::cos(incl)});
    Vec3 start = foot + h * up + trunk_radius_at(h) * out;
    const double piece = length / static_cast<double>(kBranchSegments);
    for (std::size_t k = 0; k < kBranchSegments; ++k) {
      const double f = (static_cast<double>(k) + 0.5) / static_cast<double>(kBranchSegments);
      const double r = spec.branch_radius + f * (spec.branch_tip_radius - spec.branch_radius);
      wood.push_back({start, axis, piece, r, TreePart::Branch});
      start = start + piece * axis;
    }
  }

  // Foliage: disks inside an ellipsoid, kept clear of every wood surface.
  std::vector<Disk> leaves;
  const double canopy_mid = (canopy_base + spec.tree_height) / 2.0;
  const double canopy_half = (spec.tree_height - canopy_base) / 2.0;
  const std::size_t max_attempts = 200 * spec.leaf_count + 1000;
  for (std::size_t attempt = 0; leaves.size() < spec.leaf_count && attempt < max_attempts; ++attempt) {
    const Vec3 u{draw(-1.0, 1.0), draw(-1.0, 1.0), draw(-1.0, 1.0)};
    if (u.dot(u) > 1.0) continue;
    const Vec3 center{foot.x + spec.canopy_radius * u.x, spec.canopy_radius * u.y,
                      ground + canopy_mid + canopy_half * u.z};
    if (center.z - ground - spec.leaf_radius < canopy_base) continue;
    const bool clear = std::all_of(wood.begin(), wood.end(), [&](const Cylinder& c) {
      return segment_distance(center, c.base, c.base + c.length * c.axis) >=
             c.radius + spec.leaf_radius + spec.leaf_clearance + std::sqrt(3.0) * spec.leaf_jitter;
    });
    if (!clear) continue;
    Vec3 n{0.0, 0.0, 0.0};
    while (n.norm() < 1e-6 || n.norm() > 1.0) n = Vec3{draw(-1.0, 1.0), draw(-1.0, 1.0), draw(-1.0, 1.0)};
    leaves.push_back({center, unit(n), spec.leaf_radius});
  }

  SyntheticTree tree;
  Emitter emit(spec, tree);
  std::uint64_t stream = 1;
  Vec3 hit;
  for (const Cylinder& c : wood) {
    auto rng = substream(spec.rng_seed, stream++);
    for_each_ray(cylinder_box(c), spec.angular_step, [&](Vec3 d) {
      if (hit_cylinder(c, d, hit)) emit.add(hit, c.part, rng);
    });
  }
  for (const Disk& k : leaves) {
    auto rng = substream(spec.rng_seed, stream++);
    const Vec3 r{k.radius, k.radius, k.radius};
    for_each_ray(angular_box(k.center - r, k.center + r), spec.angular_step, [&](Vec3 d) {
      if (hit_disk(k, d, hit)) emit.add(hit, TreePart::Leaf, rng);
    });
  }
  tree.cloud.origin = {};
  return tree;
}

SyntheticTreeSpec default_acceptance_tree() { return SyntheticTreeSpec{}; }

}  // namespace woodleaf

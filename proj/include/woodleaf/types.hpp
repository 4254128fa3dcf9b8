// Shared domain types for the wood/leaf classification pipeline.
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace woodleaf {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;

  double dot(Vec3 o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

/// One laser return. Coordinates are scanner-centered once inside a LabeledCloud.
struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;

  Vec3 position() const { return {x, y, z}; }
  /// Distance to the scanner, which sits at the origin of centered coordinates.
  double range() const { return position().norm(); }
  friend bool operator==(const Point&, const Point&) = default;
};

enum class ClassLabel : std::uint8_t { Wood = 0, Leaf = 1, Unassigned = 2 };

using PointIndex = std::uint32_t;
/// Ascending, duplicate-free list of point indices.
using IndexSet = std::vector<PointIndex>;

/// Points plus a parallel label array. `origin` is the scanner position that was
/// subtracted at ingestion; writers add it back.
struct LabeledCloud {
  std::vector<Point> points;
  std::vector<ClassLabel> labels;
  Vec3 origin;

  std::size_t size() const { return points.size(); }
};

/// Builds a cloud from scanner-centered points with every label Unassigned.
LabeledCloud make_cloud(std::vector<Point> centered_points, Vec3 origin = {});

struct ScanConfig {
  Vec3 scanner_position;
  double angular_step = 0.0;  // radians
};

struct PipelineParams {
  std::size_t n_seeds = 1000;
  double sphere_radius = 0.03;
  std::size_t k_neighbors = 8;
  double neighbor_ratio_threshold = 1.71;
  std::size_t voxel_divisions = 100;
  double voxel_ratio_threshold = 0.1;
  double sd1 = 2.0;
  double sd2 = 6.0;
  double height_fraction = 1.0 / 3.0;
  std::uint64_t rng_seed = 42;

  friend bool operator==(const PipelineParams&, const PipelineParams&) = default;
};

struct ParamViolation {
  std::string field;
  double value = 0.0;
  std::string reason;
};

enum class ErrorCode { InvalidArgument, Io, Parse, EmptyClass, Internal };

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Thrown by validate_params; carries every violation, not just the first.
class ParamsError : public Error {
 public:
  explicit ParamsError(std::vector<ParamViolation> violations);
  const std::vector<ParamViolation>& violations() const noexcept { return violations_; }

 private:
  std::vector<ParamViolation> violations_;
};

std::vector<ParamViolation> check_params(const PipelineParams& params);

/// Returns `params` unchanged, or throws ParamsError listing all violations.
PipelineParams validate_params(const PipelineParams& params);

void validate_scan_config(const ScanConfig& config);

/// Two index sets that together cover some parent set exactly once.
struct Partition {
  IndexSet wood;
  IndexSet leaf;
};

}  // namespace woodleaf

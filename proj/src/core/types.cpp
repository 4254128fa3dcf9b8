#include "woodleaf/types.hpp"

#include <sstream>

namespace woodleaf {

LabeledCloud make_cloud(std::vector<Point> centered_points, Vec3 origin) {
  for (std::size_t i = 0; i < centered_points.size(); ++i) {
    const Point& p = centered_points[i];
    if (!p.position().finite() || !std::isfinite(p.intensity)) {
      throw Error(ErrorCode::InvalidArgument,
                  "point " + std::to_string(i) + " has a non-finite coordinate or intensity");
    }
  }
  if (!origin.finite()) throw Error(ErrorCode::InvalidArgument, "scanner position is not finite");
  LabeledCloud cloud;
  cloud.labels.assign(centered_points.size(), ClassLabel::Unassigned);
  cloud.points = std::move(centered_points);
  cloud.origin = origin;
  return cloud;
}

namespace {

std::string describe(const std::vector<ParamViolation>& violations) {
  std::ostringstream out;
  out << "invalid pipeline parameters:";
  for (const auto& v : violations) out << ' ' << v.field << '=' << v.value << " (" << v.reason << ");";
  return out.str();
}

}  // namespace

ParamsError::ParamsError(std::vector<ParamViolation> violations)
    : Error(ErrorCode::InvalidArgument, describe(violations)), violations_(std::move(violations)) {}

std::vector<ParamViolation> check_params(const PipelineParams& p) {
  std::vector<ParamViolation> out;
  auto count = [&](const char* name, std::size_t v) {
    if (v < 1) out.push_back({name, static_cast<double>(v), "must be >= 1"});
  };
  auto positive = [&](const char* name, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) out.push_back({name, v, "must be finite and > 0"});
  };
  count("n_seeds", p.n_seeds);
  positive("sphere_radius", p.sphere_radius);
  count("k_neighbors", p.k_neighbors);
  positive("neighbor_ratio_threshold", p.neighbor_ratio_threshold);
  count("voxel_divisions", p.voxel_divisions);
  positive("voxel_ratio_threshold", p.voxel_ratio_threshold);
  positive("sd1", p.sd1);
  positive("sd2", p.sd2);
  if (!(p.height_fraction > 0.0 && p.height_fraction < 1.0)) {
    out.push_back({"height_fraction", p.height_fraction, "must lie in (0, 1)"});
  }
  // Linear voxel keys are 64-bit; 2^21 cells per axis is the ceiling.
  if (p.voxel_divisions > (std::size_t{1} << 21)) {
    out.push_back({"voxel_divisions", static_cast<double>(p.voxel_divisions), "must be <= 2097152"});
  }
  return out;
}

PipelineParams validate_params(const PipelineParams& params) {
  auto violations = check_params(params);
  if (!violations.empty()) throw ParamsError(std::move(violations));
  return params;
}

void validate_scan_config(const ScanConfig& config) {
  if (!config.scanner_position.finite()) {
    throw Error(ErrorCode::InvalidArgument, "scanner position is not finite");
  }
  if (!(config.angular_step > 0.0) || !std::isfinite(config.angular_step)) {
    throw Error(ErrorCode::InvalidArgument,
                "angular step must be finite and > 0, got " + std::to_string(config.angular_step));
  }
}

}  // namespace woodleaf

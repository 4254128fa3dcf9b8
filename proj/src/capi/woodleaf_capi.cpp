#include "woodleaf/woodleaf.h"

#include <algorithm>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "woodleaf/cloud_io.hpp"
#include "woodleaf/metrics.hpp"
#include "woodleaf/pipeline.hpp"
#include "woodleaf/synth_scanner.hpp"

struct wl_cloud {
  woodleaf::LabeledCloud cloud;
};

struct wl_labels {
  std::vector<woodleaf::ClassLabel> values;
};

struct wl_result {
  woodleaf::ClassificationResult result;
};

namespace {

using namespace woodleaf;

thread_local std::string g_last_error;

wl_status fail(wl_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

wl_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return WL_INVALID_ARGUMENT;
    case ErrorCode::Io: return WL_IO;
    case ErrorCode::Parse: return WL_PARSE;
    case ErrorCode::EmptyClass: return WL_EMPTY_CLASS;
    case ErrorCode::Internal: return WL_INTERNAL;
  }
  return WL_INTERNAL;
}

/// Runs `body`, mapping every exception to a status and a thread-local message.
template <class F>
wl_status guarded(F&& body) noexcept {
  try {
    body();
    return WL_OK;
  } catch (const Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(WL_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(WL_INTERNAL, e.what());
  } catch (...) {
    return fail(WL_INTERNAL, "unknown error");
  }
}

#define WL_REQUIRE(cond, what)                                      \
  do {                                                              \
    if (!(cond)) return fail(WL_INVALID_ARGUMENT, what " is NULL"); \
  } while (0)

PipelineParams from_c(const wl_params& p) {
  PipelineParams q;
  q.n_seeds = p.n_seeds;
  q.sphere_radius = p.sphere_radius;
  q.k_neighbors = p.k_neighbors;
  q.neighbor_ratio_threshold = p.neighbor_ratio_threshold;
  q.voxel_divisions = p.voxel_divisions;
  q.voxel_ratio_threshold = p.voxel_ratio_threshold;
  q.sd1 = p.sd1;
  q.sd2 = p.sd2;
  q.height_fraction = p.height_fraction;
  q.rng_seed = p.rng_seed;
  return q;
}

wl_params to_c(const PipelineParams& q) {
  return {q.n_seeds, q.sphere_radius, q.k_neighbors, q.neighbor_ratio_threshold, q.voxel_divisions,
          q.voxel_ratio_threshold, q.sd1, q.sd2, q.height_fraction, q.rng_seed};
}

CloudFileFormat from_c(wl_format f) {
  switch (f) {
    case WL_FORMAT_XYZI: return CloudFileFormat::XyziText;
    case WL_FORMAT_PLY_ASCII: return CloudFileFormat::PlyAscii;
    case WL_FORMAT_PLY_BINARY: return CloudFileFormat::PlyBinaryLittleEndian;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown format " + std::to_string(static_cast<int>(f)));
}

wl_format to_c(CloudFileFormat f) {
  switch (f) {
    case CloudFileFormat::XyziText: return WL_FORMAT_XYZI;
    case CloudFileFormat::PlyAscii: return WL_FORMAT_PLY_ASCII;
    case CloudFileFormat::PlyBinaryLittleEndian: return WL_FORMAT_PLY_BINARY;
  }
  return WL_FORMAT_XYZI;
}

SyntheticTreeSpec from_c(const wl_synth_spec& s) {
  SyntheticTreeSpec t;
  t.tree_height = s.tree_height;
  t.trunk_height_fraction = s.trunk_height_fraction;
  t.trunk_radius = s.trunk_radius;
  t.trunk_top_radius = s.trunk_top_radius;
  t.branch_count = s.branch_count;
  t.branch_min_inclination_deg = s.branch_min_inclination_deg;
  t.branch_max_inclination_deg = s.branch_max_inclination_deg;
  t.branch_min_length = s.branch_min_length;
  t.branch_max_length = s.branch_max_length;
  t.branch_radius = s.branch_radius;
  t.branch_tip_radius = s.branch_tip_radius;
  t.leaf_count = s.leaf_count;
  t.leaf_radius = s.leaf_radius;
  t.canopy_base_fraction = s.canopy_base_fraction;
  t.canopy_radius = s.canopy_radius;
  t.leaf_clearance = s.leaf_clearance;
  t.scanner_distance = s.scanner_distance;
  t.scanner_height = s.scanner_height;
  t.angular_step = s.angular_step;
  t.wood_intensity_mean = s.wood_intensity_mean;
  t.wood_intensity_spread = s.wood_intensity_spread;
  t.leaf_intensity_mean = s.leaf_intensity_mean;
  t.leaf_intensity_spread = s.leaf_intensity_spread;
  t.leaf_jitter = s.leaf_jitter;
  t.rng_seed = s.rng_seed;
  return t;
}

wl_synth_spec to_c(const SyntheticTreeSpec& t) {
  return {t.tree_height, t.trunk_height_fraction, t.trunk_radius, t.trunk_top_radius, t.branch_count,
          t.branch_min_inclination_deg, t.branch_max_inclination_deg, t.branch_min_length, t.branch_max_length,
          t.branch_radius, t.branch_tip_radius, t.leaf_count, t.leaf_radius, t.canopy_base_fraction,
          t.canopy_radius, t.leaf_clearance, t.scanner_distance, t.scanner_height, t.angular_step,
          t.wood_intensity_mean, t.wood_intensity_spread, t.leaf_intensity_mean, t.leaf_intensity_spread,
          t.leaf_jitter, t.rng_seed};
}

wl_report to_c(const AccuracyReport& r) {
  wl_report out{};
  out.tp = r.counts.tp;
  out.tn = r.counts.tn;
  out.fp = r.counts.fp;
  out.fn = r.counts.fn;
  out.oa = r.oa;
  out.kappa = r.kappa.value;
  out.mcc = r.mcc.value;
  out.kappa_degenerate = r.kappa.degenerate ? 1 : 0;
  out.mcc_degenerate = r.mcc.degenerate ? 1 : 0;
  out.elapsed_seconds = r.timing.elapsed_seconds;
  out.ms_per_million = r.timing.ms_per_million;
  return out;
}

AccuracyReport from_c(const wl_report& r) {
  AccuracyReport out;
  out.counts = {r.tp, r.tn, r.fp, r.fn};
  out.oa = r.oa;
  out.kappa = {r.kappa, r.kappa_degenerate != 0};
  out.mcc = {r.mcc, r.mcc_degenerate != 0};
  out.timing.elapsed_seconds = r.elapsed_seconds;
  out.timing.ms_per_million = r.ms_per_million;
  if (r.elapsed_seconds > 0.0) out.timing.points_per_second = static_cast<double>(out.counts.total()) / r.elapsed_seconds;
  return out;
}

Vec3 position_or_origin(const double p[3]) { return p ? Vec3{p[0], p[1], p[2]} : Vec3{}; }

void copy_text(const std::string& text, char* buf, std::size_t cap, std::size_t* needed) {
  if (needed) *needed = text.size();
  if (buf && cap > 0) {
    const std::size_t n = std::min(cap - 1, text.size());
    std::memcpy(buf, text.data(), n);
    buf[n] = '\0';
  }
}

AccuracyReport report_for(const ConfusionCounts& counts, double elapsed_seconds) {
  return elapsed_seconds > 0.0 ? make_report(counts, elapsed_seconds) : make_report(counts);
}

}  // namespace

extern "C" {

const char* wl_version(void) { return "0.1.0"; }

const char* wl_last_error(void) { return g_last_error.c_str(); }

const char* wl_status_name(wl_status status) {
  switch (status) {
    case WL_OK: return "ok";
    case WL_INVALID_ARGUMENT: return "invalid argument";
    case WL_IO: return "i/o error";
    case WL_PARSE: return "parse error";
    case WL_EMPTY_CLASS: return "empty class";
    case WL_INTERNAL: return "internal error";
  }
  return "unknown status";
}

wl_params wl_params_default(void) { return to_c(PipelineParams{}); }

wl_status wl_params_validate(const wl_params* params) {
  WL_REQUIRE(params, "params");
  return guarded([&] { validate_params(from_c(*params)); });
}

wl_status wl_detect_format(const char* path, wl_format* out) {
  WL_REQUIRE(path, "path");
  WL_REQUIRE(out, "out");
  return guarded([&] { *out = to_c(detect_format(path)); });
}

wl_status wl_cloud_read(const char* path, wl_format format, const double scanner_position[3], wl_cloud** out) {
  WL_REQUIRE(path, "path");
  WL_REQUIRE(out, "out");
  return guarded([&] {
    auto cloud = read_cloud(path, from_c(format), position_or_origin(scanner_position));
    *out = new wl_cloud{std::move(cloud)};
  });
}

wl_status wl_cloud_create(const wl_point* points, size_t count, const double scanner_position[3], wl_cloud** out) {
  WL_REQUIRE(out, "out");
  if (count > 0 && !points) return fail(WL_INVALID_ARGUMENT, "points is NULL");
  return guarded([&] {
    const Vec3 origin = position_or_origin(scanner_position);
    if (!origin.finite()) throw Error(ErrorCode::InvalidArgument, "scanner position is not finite");
    std::vector<Point> centred(count);
    for (std::size_t i = 0; i < count; ++i) {
      centred[i] = {points[i].x - origin.x, points[i].y - origin.y, points[i].z - origin.z, points[i].intensity};
    }
    *out = new wl_cloud{make_cloud(std::move(centred), origin)};
  });
}

wl_status wl_cloud_write(const wl_cloud* cloud, const char* path, wl_format format) {
  WL_REQUIRE(cloud, "cloud");
  WL_REQUIRE(path, "path");
  return guarded([&] { write_cloud(cloud->cloud, path, from_c(format)); });
}

size_t wl_cloud_size(const wl_cloud* cloud) { return cloud ? cloud->cloud.size() : 0; }

wl_status wl_cloud_point(const wl_cloud* cloud, size_t index, wl_point* out) {
  WL_REQUIRE(cloud, "cloud");
  WL_REQUIRE(out, "out");
  if (index >= cloud->cloud.size()) return fail(WL_INVALID_ARGUMENT, "point index out of range");
  const Point& p = cloud->cloud.points[index];
  const Vec3& o = cloud->cloud.origin;
  *out = {p.x + o.x, p.y + o.y, p.z + o.z, p.intensity};
  return WL_OK;
}

void wl_cloud_free(wl_cloud* cloud) { delete cloud; }

wl_status wl_estimate_angular_step(const wl_cloud* cloud, const wl_params* params, double* out) {
  WL_REQUIRE(cloud, "cloud");
  WL_REQUIRE(out, "out");
  return guarded([&] {
    const PipelineParams p = params ? from_c(*params) : PipelineParams{};
    *out = estimate_angular_step(cloud->cloud, p);
  });
}

wl_status wl_classify(const wl_cloud* cloud, double angular_step, const wl_params* params, wl_result** out) {
  WL_REQUIRE(cloud, "cloud");
  WL_REQUIRE(out, "out");
  return guarded([&] {
    const PipelineParams p = params ? from_c(*params) : PipelineParams{};
    const ScanConfig scan{cloud->cloud.origin, angular_step};
    *out = new wl_result{classify(cloud->cloud, scan, p)};
  });
}

wl_status wl_result_labels(const wl_result* result, wl_labels** out) {
  WL_REQUIRE(result, "result");
  WL_REQUIRE(out, "out");
  return guarded([&] { *out = new wl_labels{result->result.labels}; });
}

wl_status wl_result_stage_counts(const wl_result* result, wl_stage_counts* out) {
  WL_REQUIRE(result, "result");
  WL_REQUIRE(out, "out");
  const StageTrace& t = result->result.trace;
  wl_stage_counts c{};
  c.wood_a = t.a.wood.size();
  c.leaf_a = t.a.leaf.size();
  c.wood_b = t.b.wood.size();
  c.leaf_b = t.b.leaf.size();
  c.wood_c = t.c.wood.size();
  c.leaf_c = t.c.leaf.size();
  c.leaf_d = t.leaf_d.size();
  c.wood_final = t.final.wood.size();
  c.leaf_final = t.final.leaf.size();
  c.promotions = t.promotions();
  c.threshold = t.threshold.value;
  c.threshold_fallback = t.threshold.provenance == ThresholdProvenance::MidpointFallback ? 1 : 0;
  c.seconds_intensity = t.seconds_intensity;
  c.seconds_knn = t.seconds_knn;
  c.seconds_voxel = t.seconds_voxel;
  c.seconds_verify = t.seconds_verify;
  *out = c;
  return WL_OK;
}

wl_status wl_result_trace_text(const wl_result* result, char* buf, size_t cap, size_t* needed) {
  WL_REQUIRE(result, "result");
  return guarded([&] { copy_text(format_trace(result->result.trace), buf, cap, needed); });
}

wl_status wl_result_write_colored(const wl_result* result, const wl_cloud* cloud, const char* path,
                                  wl_format format) {
  WL_REQUIRE(result, "result");
  WL_REQUIRE(cloud, "cloud");
  WL_REQUIRE(path, "path");
  if (result->result.labels.size() != cloud->cloud.size()) {
    return fail(WL_INVALID_ARGUMENT, "result and cloud sizes differ");
  }
  return guarded([&] {
    LabeledCloud labelled = cloud->cloud;
    labelled.labels = result->result.labels;
    write_cloud_colored(labelled, path, from_c(format));
  });
}

void wl_result_free(wl_result* result) { delete result; }

wl_status wl_labels_create(const uint8_t* values, size_t count, wl_labels** out) {
  WL_REQUIRE(out, "out");
  if (count > 0 && !values) return fail(WL_INVALID_ARGUMENT, "values is NULL");
  for (std::size_t i = 0; i < count; ++i) {
    if (values[i] > WL_LEAF) return fail(WL_INVALID_ARGUMENT, "label " + std::to_string(i) + " is not 0 or 1");
  }
  return guarded([&] {
    auto* labels = new wl_labels;
    labels->values.reserve(count);
    for (std::size_t i = 0; i < count; ++i) labels->values.push_back(static_cast<ClassLabel>(values[i]));
    *out = labels;
  });
}

wl_status wl_labels_read(const char* path, wl_labels** out) {
  WL_REQUIRE(path, "path");
  WL_REQUIRE(out, "out");
  return guarded([&] { *out = new wl_labels{read_labels(path)}; });
}

wl_status wl_labels_write(const wl_labels* labels, const char* path) {
  WL_REQUIRE(labels, "labels");
  WL_REQUIRE(path, "path");
  return guarded([&] { write_labels(labels->values, path); });
}

size_t wl_labels_size(const wl_labels* labels) { return labels ? labels->values.size() : 0; }

wl_status wl_labels_get(const wl_labels* labels, size_t index, wl_label* out) {
  WL_REQUIRE(labels, "labels");
  WL_REQUIRE(out, "out");
  if (index >= labels->values.size()) return fail(WL_INVALID_ARGUMENT, "label index out of range");
  *out = static_cast<wl_label>(labels->values[index]);
  return WL_OK;
}

void wl_labels_free(wl_labels* labels) { delete labels; }

wl_status wl_evaluate(const wl_labels* predicted, const wl_labels* reference, double elapsed_seconds,
                      wl_report* out) {
  WL_REQUIRE(predicted, "predicted");
  WL_REQUIRE(reference, "reference");
  WL_REQUIRE(out, "out");
  return guarded([&] {
    *out = to_c(report_for(confusion(predicted->values, reference->values), elapsed_seconds));
  });
}

wl_status wl_report_from_counts(uint64_t tp, uint64_t tn, uint64_t fp, uint64_t fn, double elapsed_seconds,
                                wl_report* out) {
  WL_REQUIRE(out, "out");
  return guarded([&] { *out = to_c(report_for({tp, tn, fp, fn}, elapsed_seconds)); });
}

wl_status wl_report_format(const wl_report* report, wl_report_style style, char* buf, size_t cap,
                           size_t* needed) {
  WL_REQUIRE(report, "report");
  return guarded([&] {
    const AccuracyReport r = from_c(*report);
    switch (style) {
      case WL_REPORT_TEXT: copy_text(format_report_text(r), buf, cap, needed); return;
      case WL_REPORT_KV: copy_text(format_report_kv(r), buf, cap, needed); return;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown report style");
  });
}

wl_synth_spec wl_synth_spec_default(void) { return to_c(default_acceptance_tree()); }

wl_status wl_synth_generate(const wl_synth_spec* spec, wl_cloud** cloud, wl_labels** truth) {
  WL_REQUIRE(spec, "spec");
  WL_REQUIRE(cloud, "cloud");
  WL_REQUIRE(truth, "truth");
  return guarded([&] {
    SyntheticTree tree = generate_tree(from_c(*spec));
    auto labels = std::make_unique<wl_labels>(wl_labels{std::move(tree.cloud.labels)});
    tree.cloud.labels.assign(tree.cloud.size(), ClassLabel::Unassigned);
    auto c = std::make_unique<wl_cloud>(wl_cloud{std::move(tree.cloud)});
    *cloud = c.release();
    *truth = labels.release();
  });
}

}  // extern "C"

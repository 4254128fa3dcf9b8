/* woodleaf C API: wood/leaf classification of terrestrial laser scans.
 *
 * All objects are opaque handles released with their *_free function (NULL is
 * accepted). Every fallible call returns a wl_status; on failure a message is
 * available from wl_last_error() on the calling thread until the next call
 * that fails on that thread. Output pointers are left untouched on failure.
 *
 * Coordinates passed in and out of a wl_cloud are in the file frame; the
 * scanner position given at load time is subtracted internally.
 */
#ifndef WOODLEAF_H
#define WOODLEAF_H

#include <stddef.h>
#include <stdint.h>

#if defined(WOODLEAF_BUILDING)
#define WL_API __attribute__((visibility("default")))
#else
#define WL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wl_status {
  WL_OK = 0,
  WL_INVALID_ARGUMENT = 1,
  WL_IO = 2,
  WL_PARSE = 3,
  WL_EMPTY_CLASS = 4, /* sphere sampling found no wood or no leaf samples */
  WL_INTERNAL = 5
} wl_status;

typedef enum wl_format {
  WL_FORMAT_XYZI = 0,
  WL_FORMAT_PLY_ASCII = 1,
  WL_FORMAT_PLY_BINARY = 2 /* binary_little_endian */
} wl_format;

typedef enum wl_label { WL_WOOD = 0, WL_LEAF = 1, WL_UNASSIGNED = 2 } wl_label;

typedef enum wl_report_style { WL_REPORT_TEXT = 0, WL_REPORT_KV = 1 } wl_report_style;

typedef struct wl_cloud wl_cloud;
typedef struct wl_labels wl_labels;
typedef struct wl_result wl_result;

typedef struct wl_params {
  size_t n_seeds;
  double sphere_radius;            /* m */
  size_t k_neighbors;
  double neighbor_ratio_threshold; /* d_a / S_s cut for wood */
  size_t voxel_divisions;          /* per axis */
  double voxel_ratio_threshold;    /* actual / expected cut for wood */
  double sd1;
  double sd2;
  double height_fraction;          /* lower/upper verification split */
  uint64_t rng_seed;
} wl_params;

typedef struct wl_point {
  double x, y, z, intensity;
} wl_point;

typedef struct wl_stage_counts {
  size_t wood_a, leaf_a; /* intensity gate */
  size_t wood_b, leaf_b; /* k-NN refinement */
  size_t wood_c, leaf_c; /* voxel refinement */
  size_t leaf_d;         /* union of the three leaf sets */
  size_t wood_final, leaf_final;
  size_t promotions;
  double threshold;      /* intensity threshold */
  int threshold_fallback; /* 1 when the midpoint-of-means fallback was used */
  double seconds_intensity, seconds_knn, seconds_voxel, seconds_verify;
} wl_stage_counts;

typedef struct wl_report {
  uint64_t tp, tn, fp, fn; /* leaf is the positive class */
  double oa;
  double kappa;
  double mcc;
  int kappa_degenerate; /* 1 when kappa is undefined and reported as 0 */
  int mcc_degenerate;
  double elapsed_seconds; /* 0 when no timing was supplied */
  double ms_per_million;
} wl_report;

typedef struct wl_synth_spec {
  double tree_height;
  double trunk_height_fraction;
  double trunk_radius;
  double trunk_top_radius;
  size_t branch_count;
  double branch_min_inclination_deg;
  double branch_max_inclination_deg;
  double branch_min_length;
  double branch_max_length;
  double branch_radius;
  double branch_tip_radius;
  size_t leaf_count;
  double leaf_radius;
  double canopy_base_fraction;
  double canopy_radius;
  double leaf_clearance;
  double scanner_distance;
  double scanner_height;
  double angular_step;
  double wood_intensity_mean;
  double wood_intensity_spread;
  double leaf_intensity_mean;
  double leaf_intensity_spread;
  double leaf_jitter;
  uint64_t rng_seed;
} wl_synth_spec;

WL_API const char* wl_version(void);
WL_API const char* wl_last_error(void);
WL_API const char* wl_status_name(wl_status status);

/* Parameters */
WL_API wl_params wl_params_default(void);
/* Checks every field; the message lists all violations. */
WL_API wl_status wl_params_validate(const wl_params* params);

/* Clouds */
WL_API wl_status wl_detect_format(const char* path, wl_format* out);
WL_API wl_status wl_cloud_read(const char* path, wl_format format, const double scanner_position[3],
                               wl_cloud** out);
WL_API wl_status wl_cloud_create(const wl_point* points, size_t count, const double scanner_position[3],
                                 wl_cloud** out);
WL_API wl_status wl_cloud_write(const wl_cloud* cloud, const char* path, wl_format format);
WL_API size_t wl_cloud_size(const wl_cloud* cloud);
WL_API wl_status wl_cloud_point(const wl_cloud* cloud, size_t index, wl_point* out);
WL_API void wl_cloud_free(wl_cloud* cloud);

/* Median nearest-neighbour distance over range on wood-candidate samples. */
WL_API wl_status wl_estimate_angular_step(const wl_cloud* cloud, const wl_params* params, double* out);

/* Classification. params may be NULL for defaults. */
WL_API wl_status wl_classify(const wl_cloud* cloud, double angular_step, const wl_params* params,
                             wl_result** out);
WL_API wl_status wl_result_labels(const wl_result* result, wl_labels** out);
WL_API wl_status wl_result_stage_counts(const wl_result* result, wl_stage_counts* out);
/* Copies the stage table into buf (always NUL-terminated when cap > 0) and
 * stores the full length excluding the NUL in *needed when non-NULL. */
WL_API wl_status wl_result_trace_text(const wl_result* result, char* buf, size_t cap, size_t* needed);
/* PLY with wood (139,69,19) and leaf (34,139,34) vertex colours. */
WL_API wl_status wl_result_write_colored(const wl_result* result, const wl_cloud* cloud, const char* path,
                                         wl_format format);
WL_API void wl_result_free(wl_result* result);

/* Labels */
WL_API wl_status wl_labels_create(const uint8_t* values, size_t count, wl_labels** out);
WL_API wl_status wl_labels_read(const char* path, wl_labels** out);
WL_API wl_status wl_labels_write(const wl_labels* labels, const char* path);
WL_API size_t wl_labels_size(const wl_labels* labels);
WL_API wl_status wl_labels_get(const wl_labels* labels, size_t index, wl_label* out);
WL_API void wl_labels_free(wl_labels* labels);

/* Metrics. elapsed_seconds <= 0 means no timing. */
WL_API wl_status wl_evaluate(const wl_labels* predicted, const wl_labels* reference, double elapsed_seconds,
                             wl_report* out);
WL_API wl_status wl_report_from_counts(uint64_t tp, uint64_t tn, uint64_t fp, uint64_t fn,
                                       double elapsed_seconds, wl_report* out);
/* Same buffer contract as wl_result_trace_text. */
WL_API wl_status wl_report_format(const wl_report* report, wl_report_style style, char* buf, size_t cap,
                                  size_t* needed);

/* Synthetic scans. The generated cloud is scanner-centred. */
WL_API wl_synth_spec wl_synth_spec_default(void);
WL_API wl_status wl_synth_generate(const wl_synth_spec* spec, wl_cloud** cloud, wl_labels** truth);

#ifdef __cplusplus
}
#endif

#endif /* WOODLEAF_H */

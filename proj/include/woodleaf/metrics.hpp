// Confusion counts and accuracy indicators. Leaf is the positive class.
#pragma once

#include <cstdint>
#include <string>

#include "woodleaf/types.hpp"

namespace woodleaf {

struct ConfusionCounts {
  std::uint64_t tp = 0;  // leaf predicted leaf
  std::uint64_t tn = 0;  // wood predicted wood
  std::uint64_t fp = 0;  // wood predicted leaf
  std::uint64_t fn = 0;  // leaf predicted wood

  std::uint64_t total() const { return tp + tn + fp + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts confusion(std::span<const ClassLabel> predicted, std::span<const ClassLabel> reference);

double overall_accuracy(const ConfusionCounts& c);

/// Value plus a flag set when the indicator is undefined and reported as 0.
struct Indicator {
  double value = 0.0;
  bool degenerate = false;
};

Indicator kappa(const ConfusionCounts& c);
Indicator mcc(const ConfusionCounts& c);

struct Throughput {
  double elapsed_seconds = 0.0;
  double points_per_second = 0.0;
  double ms_per_million = 0.0;
};

Throughput throughput_report(double elapsed_seconds, std::uint64_t point_count);

struct AccuracyReport {
  ConfusionCounts counts;
  double oa = 0.0;
  Indicator kappa;
  Indicator mcc;
  Throughput timing;  // zero when no timing was supplied
};

AccuracyReport make_report(const ConfusionCounts& counts);
AccuracyReport make_report(const ConfusionCounts& counts, double elapsed_seconds);

/// Aligned plain-text table.
std::string format_report_text(const AccuracyReport& r);
/// `key=value` lines: tp, tn, fp, fn, oa, kappa, mcc, elapsed_ms, ms_per_million.
std::string format_report_kv(const AccuracyReport& r);

}  // namespace woodleaf

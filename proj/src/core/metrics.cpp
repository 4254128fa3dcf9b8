#include "woodleaf/metrics.hpp"

#include <cmath>
#include <cstdio>

namespace woodleaf {

ConfusionCounts confusion(std::span<const ClassLabel> predicted, std::span<const ClassLabel> reference) {
  if (predicted.size() != reference.size()) {
    throw Error(ErrorCode::InvalidArgument, "predicted has " + std::to_string(predicted.size()) +
                                                " labels but reference has " + std::to_string(reference.size()));
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const ClassLabel p = predicted[i], r = reference[i];
    if (p == ClassLabel::Unassigned || r == ClassLabel::Unassigned) {
      throw Error(ErrorCode::InvalidArgument, "label " + std::to_string(i) + " is unassigned");
    }
    if (r == ClassLabel::Leaf) {
      ++(p == ClassLabel::Leaf ? c.tp : c.fn);
    } else {
      ++(p == ClassLabel::Wood ? c.tn : c.fp);
    }
  }
  return c;
}

double overall_accuracy(const ConfusionCounts& c) {
  if (c.total() == 0) throw Error(ErrorCode::InvalidArgument, "accuracy of an empty confusion matrix");
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

// Counts are promoted to double before any product; at 1e9 points the MCC
// denominator is ~1e36, far beyond 64-bit integers.
Indicator kappa(const ConfusionCounts& c) {
  if (c.total() == 0) throw Error(ErrorCode::InvalidArgument, "kappa of an empty confusion matrix");
  const double tp = c.tp, tn = c.tn, fp = c.fp, fn = c.fn;
  const double n = tp + tn + fp + fn;
  const double po = (tp + tn) / n;
  const double pe = ((tp + fp) / n) * ((tp + fn) / n) + ((tn + fn) / n) * ((tn + fp) / n);
  if (pe >= 1.0) return {0.0, true};
  return {(po - pe) / (1.0 - pe), false};
}

Indicator mcc(const ConfusionCounts& c) {
  if (c.total() == 0) throw Error(ErrorCode::InvalidArgument, "MCC of an empty confusion matrix");
  const double tp = c.tp, tn = c.tn, fp = c.fp, fn = c.fn;
  const double a = tp + fp, b = tp + fn, d = tn + fn, e = tn + fp;
  if (a == 0 || b == 0 || d == 0 || e == 0) return {0.0, true};
  return {(tp * tn - fp * fn) / (std::sqrt(a) * std::sqrt(b) * std::sqrt(d) * std::sqrt(e)), false};
}

Throughput throughput_report(double elapsed_seconds, std::uint64_t point_count) {
  if (!(elapsed_seconds > 0.0)) throw Error(ErrorCode::InvalidArgument, "elapsed time must be > 0");
  if (point_count == 0) throw Error(ErrorCode::InvalidArgument, "throughput of zero points");
  const double n = static_cast<double>(point_count);
  return {elapsed_seconds, n / elapsed_seconds, elapsed_seconds * 1000.0 / (n / 1e6)};
}

AccuracyReport make_report(const ConfusionCounts& counts) {
  AccuracyReport r;
  r.counts = counts;
  r.oa = overall_accuracy(counts);
  r.kappa = kappa(counts);
  r.mcc = mcc(counts);
  return r;
}

AccuracyReport make_report(const ConfusionCounts& counts, double elapsed_seconds) {
  AccuracyReport r = make_report(counts);
  r.timing = throughput_report(elapsed_seconds, counts.total());
  return r;
}

namespace {

std::string line(const char* fmt, auto... args) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

}  // namespace

std::string format_report_text(const AccuracyReport& r) {
  const auto& c = r.counts;
  std::string out;
  out += line("%-16s %14s\n", "indicator", "value");
  out += line("%-16s %14llu\n", "TP (leaf)", static_cast<unsigned long long>(c.tp));
  out += line("%-16s %14llu\n", "TN (wood)", static_cast<unsigned long long>(c.tn));
  out += line("%-16s %14llu\n", "FP", static_cast<unsigned long long>(c.fp));
  out += line("%-16s %14llu\n", "FN", static_cast<unsigned long long>(c.fn));
  out += line("%-16s %14llu\n", "N", static_cast<unsigned long long>(c.total()));
  out += line("%-16s %14.4f\n", "OA", r.oa);
  out += line("%-16s %14.4f%s\n", "Kappa", r.kappa.value, r.kappa.degenerate ? "  (undefined)" : "");
  out += line("%-16s %14.4f%s\n", "MCC", r.mcc.value, r.mcc.degenerate ? "  (undefined)" : "");
  if (r.timing.elapsed_seconds > 0.0) {
    out += line("%-16s %14.1f\n", "time / ms", r.timing.elapsed_seconds * 1000.0);
    out += line("%-16s %14.1f\n", "ms / Mpts", r.timing.ms_per_million);
  }
  return out;
}

std::string format_report_kv(const AccuracyReport& r) {
  const auto& c = r.counts;
  std::string out;
  out += line("tp=%llu\n", static_cast<unsigned long long>(c.tp));
  out += line("tn=%llu\n", static_cast<unsigned long long>(c.tn));
  out += line("fp=%llu\n", static_cast<unsigned long long>(c.fp));
  out += line("fn=%llu\n", static_cast<unsigned long long>(c.fn));
  out += line("oa=%.6f\n", r.oa);
  out += line("kappa=%.6f\n", r.kappa.value);
  out += line("mcc=%.6f\n", r.mcc.value);
  out += line("elapsed_ms=%.3f\n", r.timing.elapsed_seconds * 1000.0);
  out += line("ms_per_million=%.3f\n", r.timing.ms_per_million);
  return out;
}

}  // namespace woodleaf

// woodleaf command-line front end, built on the C API only.
#include <woodleaf/woodleaf.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kIo = 2, kPipeline = 3 };

constexpr const char* kExitCodeHelp =
    "Exit codes: 0 success, 1 bad usage or invalid parameters, 2 I/O or parse error, "
    "3 pipeline failure (e.g. no wood or no leaf seed samples).";

int exit_code_for(wl_status s) {
  switch (s) {
    case WL_OK: return kOk;
    case WL_INVALID_ARGUMENT: return kUsage;
    case WL_IO:
    case WL_PARSE: return kIo;
    case WL_EMPTY_CLASS:
    case WL_INTERNAL: return kPipeline;
  }
  return kPipeline;
}

std::mutex g_err_mutex;

void diag(const std::string& message) {
  std::lock_guard lock(g_err_mutex);
  std::fprintf(stderr, "woodleaf: %s\n", message.c_str());
}

/// Failure carrying the exit code it maps to.
struct Failure {
  int code;
  std::string message;
};

void check(wl_status s, const std::string& context) {
  if (s != WL_OK) throw Failure{exit_code_for(s), context + ": " + wl_last_error()};
}

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};
using Cloud = Handle<wl_cloud, wl_cloud_free>;
using Labels = Handle<wl_labels, wl_labels_free>;
using Result = Handle<wl_result, wl_result_free>;

std::string fetch_text(auto&& fn) {
  std::size_t needed = 0;
  fn(nullptr, 0, &needed);
  std::string s(needed + 1, '\0');
  fn(s.data(), s.size(), &needed);
  s.resize(needed);
  return s;
}

const std::map<std::string, wl_format> kFormats{
    {"xyzi", WL_FORMAT_XYZI}, {"ply", WL_FORMAT_PLY_BINARY}, {"ply-ascii", WL_FORMAT_PLY_ASCII},
    {"ply-binary", WL_FORMAT_PLY_BINARY}};

wl_format resolve_format(const std::string& flag, const fs::path& path) {
  if (!flag.empty()) return kFormats.at(flag);
  wl_format f;
  check(wl_detect_format(path.c_str(), &f), path.string());
  return f;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text) || !out.flush()) throw Failure{kIo, path.string() + ": cannot write"};
}

struct ClassifyOptions {
  std::vector<std::string> inputs;
  std::string output;
  std::string format;
  std::string reference;
  std::array<double, 3> scanner{0.0, 0.0, 0.0};
  std::optional<double> angular_step;
  bool estimate_step = false;
  bool colored_ply = false;
  unsigned jobs = 1;
};

struct FileJob {
  fs::path input;
  fs::path labels;
  fs::path colored;
};

/// Classifies one file; returns the stdout report block.
std::string classify_one(const FileJob& job, const ClassifyOptions& opt, const wl_params& params) {
  Cloud cloud;
  const wl_format format = resolve_format(opt.format, job.input);
  check(wl_cloud_read(job.input.c_str(), format, opt.scanner.data(), cloud.out()), job.input.string());

  double step = opt.angular_step.value_or(0.0);
  std::string out = "# " + job.input.string() + "\n";
  if (opt.estimate_step) {
    check(wl_estimate_angular_step(cloud.get(), &params, &step), job.input.string() + ": angular step estimate");
    char line[128];
    std::snprintf(line, sizeof line, "estimated angular step %.6g rad\n", step);
    out += line;
    diag(job.input.string() + ": using estimated angular step " + std::to_string(step) + " rad");
  }

  Result result;
  const auto start = std::chrono::steady_clock::now();
  check(wl_classify(cloud.get(), step, &params, result.out()), job.input.string());
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  Labels labels;
  check(wl_result_labels(result.get(), labels.out()), job.input.string());
  check(wl_labels_write(labels.get(), job.labels.c_str()), job.labels.string());
  if (!job.colored.empty()) {
    check(wl_result_write_colored(result.get(), cloud.get(), job.colored.c_str(), WL_FORMAT_PLY_BINARY),
          job.colored.string());
  }

  out += fetch_text([&](char* b, std::size_t c, std::size_t* n) { wl_result_trace_text(result.get(), b, c, n); });
  if (!opt.reference.empty()) {
    Labels reference;
    check(wl_labels_read(opt.reference.c_str(), reference.out()), opt.reference);
    wl_report report;
    check(wl_evaluate(labels.get(), reference.get(), elapsed, &report), "evaluate");
    out += fetch_text(
        [&](char* b, std::size_t c, std::size_t* n) { wl_report_format(&report, WL_REPORT_TEXT, b, c, n); });
  } else {
    char line[160];
    std::snprintf(line, sizeof line, "elapsed %.1f ms, %.1f ms per million points\n", elapsed * 1e3,
                  elapsed * 1e3 / (static_cast<double>(wl_cloud_size(cloud.get())) / 1e6));
    out += line;
  }
  return out;
}

std::vector<FileJob> plan_jobs(const ClassifyOptions& opt) {
  std::vector<FileJob> jobs;
  if (opt.inputs.size() == 1) {
    const fs::path labels = opt.output;
    fs::path colored;
    if (opt.colored_ply) colored = fs::path(labels).replace_extension(".colored.ply");
    jobs.push_back({opt.inputs.front(), labels, colored});
    return jobs;
  }
  const fs::path dir = opt.output;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure{kIo, dir.string() + ": " + ec.message()};
  for (const auto& in : opt.inputs) {
    const fs::path stem = fs::path(in).stem();
    FileJob job{in, dir / stem.string().append(".labels"), {}};
    if (opt.colored_ply) job.colored = dir / stem.string().append(".colored.ply");
    jobs.push_back(std::move(job));
  }
  return jobs;
}

int run_classify(const ClassifyOptions& opt, const wl_params& params) {
  if (!opt.angular_step && !opt.estimate_step) {
    diag("classify needs --angular-step or --estimate-step");
    return kUsage;
  }
  if (opt.reference.size() && opt.inputs.size() > 1) {
    diag("--reference applies to a single --input");
    return kUsage;
  }
  check(wl_params_validate(&params), "parameters");

  const auto jobs = plan_jobs(opt);
  std::vector<std::string> reports(jobs.size());
  std::vector<int> codes(jobs.size(), kOk);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < jobs.size();) {
      try {
        reports[i] = classify_one(jobs[i], opt, params);
      } catch (const Failure& f) {
        codes[i] = f.code;
        diag(f.message);
      } catch (const std::exception& e) {
        codes[i] = kPipeline;
        diag(jobs[i].input.string() + ": " + e.what());
      }
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(opt.jobs, static_cast<unsigned>(jobs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const auto& r : reports) std::fputs(r.c_str(), stdout);
  return *std::max_element(codes.begin(), codes.end());
}

struct EvaluateOptions {
  std::string labels;
  std::string reference;
  std::string output;
  std::string format = "text";
  double elapsed_ms = 0.0;
};

int run_evaluate(const EvaluateOptions& opt) {
  Labels predicted, reference;
  check(wl_labels_read(opt.labels.c_str(), predicted.out()), opt.labels);
  check(wl_labels_read(opt.reference.c_str(), reference.out()), opt.reference);
  wl_report report;
  check(wl_evaluate(predicted.get(), reference.get(), opt.elapsed_ms / 1e3, &report), "evaluate");
  const wl_report_style style = opt.format == "kv" ? WL_REPORT_KV : WL_REPORT_TEXT;
  const std::string text =
      fetch_text([&](char* b, std::size_t c, std::size_t* n) { wl_report_format(&report, style, b, c, n); });
  if (opt.output.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    write_text(opt.output, text);
  }
  return kOk;
}

struct SynthOptions {
  std::string output;
  std::string labels;
  std::string format;
  std::optional<std::uint64_t> seed;
  std::optional<double> angular_step;
};

int run_synth(const SynthOptions& opt) {
  wl_synth_spec spec = wl_synth_spec_default();
  if (opt.seed) spec.rng_seed = *opt.seed;
  if (opt.angular_step) spec.angular_step = *opt.angular_step;
  Cloud cloud;
  Labels truth;
  check(wl_synth_generate(&spec, cloud.out(), truth.out()), "synth");
  const fs::path labels = opt.labels.empty() ? fs::path(opt.output + ".labels") : fs::path(opt.labels);
  check(wl_cloud_write(cloud.get(), opt.output.c_str(), resolve_format(opt.format, opt.output)), opt.output);
  check(wl_labels_write(truth.get(), labels.c_str()), labels.string());
  std::printf("wrote %zu points to %s, labels to %s\n", wl_cloud_size(cloud.get()), opt.output.c_str(),
              labels.c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wood/leaf classification of terrestrial laser scans of single trees."};
  app.footer(kExitCodeHelp);
  app.require_subcommand(1);
  app.set_version_flag("--version", wl_version());

  const auto format_check = CLI::IsMember(
      [] {
        std::vector<std::string> names;
        for (const auto& [k, v] : kFormats) names.push_back(k);
        return names;
      }());

  wl_params params = wl_params_default();
  ClassifyOptions copt;
  auto* classify = app.add_subcommand("classify", "Label every point of one or more clouds as wood (0) or leaf (1).");
  classify->footer(kExitCodeHelp);
  classify->add_option("--input", copt.inputs, "Input cloud(s): .xyz/.txt (x y z intensity) or .ply")
      ->required()
      ->check(CLI::ExistingFile);
  classify->add_option("--output", copt.output, "Label file; a directory when several inputs are given")
      ->required();
  classify->add_option("--format", copt.format, "Input format, detected from the file when omitted")
      ->check(format_check);
  classify->add_option("--reference", copt.reference, "Ground-truth labels; prints an accuracy report")
      ->check(CLI::ExistingFile);
  classify->add_option("--scanner-pos", copt.scanner, "Scanner position x y z in file coordinates")
      ->expected(3);
  classify->add_option("--angular-step", copt.angular_step, "Scanner angular step in radians")
      ->check(CLI::PositiveNumber);
  classify->add_flag("--estimate-step", copt.estimate_step, "Estimate the angular step from the cloud");
  classify->add_flag("--colored-ply", copt.colored_ply, "Also write a class-coloured PLY beside each label file");
  classify->add_option("--jobs", copt.jobs, "Files classified concurrently")->check(CLI::PositiveNumber);
  classify->add_option("--seed", params.rng_seed, "Seed for sphere sampling")->capture_default_str();
  classify->add_option("--n-seeds", params.n_seeds, "Number of sampling spheres")->capture_default_str();
  classify->add_option("--radius", params.sphere_radius, "Sampling sphere radius, m")->capture_default_str();
  classify->add_option("--k", params.k_neighbors, "Neighbours for the spacing test")->capture_default_str();
  classify->add_option("--thr", params.neighbor_ratio_threshold, "Mean neighbour distance / spacing cut")
      ->capture_default_str();
  classify->add_option("--divisions", params.voxel_divisions, "Voxel divisions per axis")->capture_default_str();
  classify->add_option("--voxel-ratio", params.voxel_ratio_threshold, "Actual / expected voxel count cut")
      ->capture_default_str();
  classify->add_option("--sd1", params.sd1, "Unconditional promotion distance, in spacings")
      ->capture_default_str();
  classify->add_option("--sd2", params.sd2, "Intensity-gated promotion distance, in spacings")
      ->capture_default_str();
  classify->add_option("--height-fraction", params.height_fraction, "Lower/upper verification split")
      ->capture_default_str();

  EvaluateOptions eopt;
  auto* evaluate = app.add_subcommand("evaluate", "Compare predicted labels with reference labels.");
  evaluate->footer(kExitCodeHelp);
  evaluate->add_option("--labels", eopt.labels, "Predicted label file")->required();
  evaluate->add_option("--reference", eopt.reference, "Reference label file")->required();
  evaluate->add_option("--output", eopt.output, "Report file; stdout when omitted");
  evaluate->add_option("--format", eopt.format, "Report format")
      ->check(CLI::IsMember({"text", "kv"}))
      ->capture_default_str();
  evaluate->add_option("--elapsed-ms", eopt.elapsed_ms, "Classification time to report throughput for")
      ->check(CLI::NonNegativeNumber);

  SynthOptions sopt;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic tree scan with ground-truth labels.");
  synth->footer(kExitCodeHelp);
  synth->add_option("--output", sopt.output, "Cloud file (.ply or .xyz)")->required();
  synth->add_option("--labels", sopt.labels, "Ground-truth label file, default <output>.labels");
  synth->add_option("--format", sopt.format, "Cloud format, from the extension when omitted")
      ->check(format_check);
  synth->add_option("--seed", sopt.seed, "Generator seed");
  synth->add_option("--angular-step", sopt.angular_step, "Scanner angular step in radians")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*classify) return run_classify(copt, params);
    if (*evaluate) return run_evaluate(eopt);
    if (*synth) return run_synth(sopt);
  } catch (const Failure& f) {
    diag(f.message);
    return f.code;
  } catch (const std::exception& e) {
    diag(e.what());
    return kPipeline;
  }
  return kUsage;
}

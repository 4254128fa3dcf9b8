#include "doctest.h"
#include "test_support.hpp"
#include "woodleaf/woodleaf.h"

#include <cmath>
#include <cstring>
#include <string>

using woodleaf::testing::ScratchDir;

namespace {

struct Synth {
  wl_cloud* cloud = nullptr;
  wl_labels* truth = nullptr;
  explicit Synth(double step_scale = 1.0) {
    wl_synth_spec spec = wl_synth_spec_default();
    spec.angular_step *= step_scale;
    REQUIRE(wl_synth_generate(&spec, &cloud, &truth) == WL_OK);
  }
  ~Synth() {
    wl_cloud_free(cloud);
    wl_labels_free(truth);
  }
};

}  // namespace

TEST_CASE("defaults and validation") {
  wl_params p = wl_params_default();
  CHECK(p.n_seeds == 1000);
  CHECK(p.sphere_radius == 0.03);
  CHECK(p.k_neighbors == 8);
  CHECK(wl_params_validate(&p) == WL_OK);
  p.sphere_radius = 0.0;
  p.height_fraction = 1.5;
  CHECK(wl_params_validate(&p) == WL_INVALID_ARGUMENT);
  const std::string msg = wl_last_error();
  CHECK(msg.find("sphere_radius") != std::string::npos);
  CHECK(msg.find("height_fraction") != std::string::npos);
  CHECK(wl_params_validate(nullptr) == WL_INVALID_ARGUMENT);
  CHECK(std::strlen(wl_version()) > 0);
  CHECK(std::string(wl_status_name(WL_EMPTY_CLASS)) == "empty class");
}

TEST_CASE("cloud creation centres on the scanner and reports file-frame points") {
  const wl_point pts[2] = {{11, 2, 3, 40}, {12, 2, 3, 41}};
  const double scanner[3] = {10, 2, 0};
  wl_cloud* c = nullptr;
  REQUIRE(wl_cloud_create(pts, 2, scanner, &c) == WL_OK);
  CHECK(wl_cloud_size(c) == 2);
  wl_point p;
  REQUIRE(wl_cloud_point(c, 1, &p) == WL_OK);
  CHECK(p.x == 12);
  CHECK(p.intensity == 41);
  CHECK(wl_cloud_point(c, 2, &p) == WL_INVALID_ARGUMENT);
  wl_cloud_free(c);
  CHECK(wl_cloud_create(nullptr, 3, nullptr, &c) == WL_INVALID_ARGUMENT);
  const wl_point bad[1] = {{NAN, 0, 0, 0}};
  CHECK(wl_cloud_create(bad, 1, nullptr, &c) == WL_INVALID_ARGUMENT);
  wl_cloud_free(nullptr);
}

TEST_CASE("I/O errors map to status codes") {
  ScratchDir dir("capi");
  wl_cloud* c = nullptr;
  CHECK(wl_cloud_read((dir / "missing.xyz").c_str(), WL_FORMAT_XYZI, nullptr, &c) == WL_IO);
  CHECK(c == nullptr);
  {
    std::FILE* f = std::fopen((dir / "bad.xyz").c_str(), "w");
    std::fputs("1 2 zz 4\n", f);
    std::fclose(f);
  }
  CHECK(wl_cloud_read((dir / "bad.xyz").c_str(), WL_FORMAT_XYZI, nullptr, &c) == WL_PARSE);
  CHECK(std::string(wl_last_error()).find("bad.xyz") != std::string::npos);
}

TEST_CASE("synthesise, write, read back, classify, evaluate") {
  ScratchDir dir("capi");
  Synth s;
  const std::string path = (dir / "tree.ply").string();
  REQUIRE(wl_cloud_write(s.cloud, path.c_str(), WL_FORMAT_PLY_BINARY) == WL_OK);
  wl_format fmt;
  REQUIRE(wl_detect_format(path.c_str(), &fmt) == WL_OK);
  CHECK(fmt == WL_FORMAT_PLY_BINARY);
  wl_cloud* back = nullptr;
  REQUIRE(wl_cloud_read(path.c_str(), fmt, nullptr, &back) == WL_OK);
  REQUIRE(wl_cloud_size(back) == wl_cloud_size(s.cloud));
  CHECK(wl_labels_size(s.truth) == wl_cloud_size(s.cloud));

  const wl_synth_spec spec = wl_synth_spec_default();
  wl_result* r = nullptr;
  REQUIRE(wl_classify(back, spec.angular_step, nullptr, &r) == WL_OK);
  wl_labels* pred = nullptr;
  REQUIRE(wl_result_labels(r, &pred) == WL_OK);

  wl_report rep;
  REQUIRE(wl_evaluate(pred, s.truth, 1.5, &rep) == WL_OK);
  CHECK(rep.oa >= 0.90);
  CHECK(rep.kappa >= 0.70);
  CHECK(rep.mcc >= 0.70);
  CHECK(rep.tp + rep.tn + rep.fp + rep.fn == wl_cloud_size(back));
  CHECK(rep.elapsed_seconds == 1.5);

  wl_stage_counts sc;
  REQUIRE(wl_result_stage_counts(r, &sc) == WL_OK);
  CHECK(sc.wood_a + sc.leaf_a == wl_cloud_size(back));
  CHECK(sc.wood_final == sc.wood_c + sc.promotions);
  CHECK(sc.leaf_d - sc.leaf_final == sc.promotions);

  size_t needed = 0;
  REQUIRE(wl_result_trace_text(r, nullptr, 0, &needed) == WL_OK);
  CHECK(needed > 0);
  std::string text(needed + 1, '\0');
  REQUIRE(wl_result_trace_text(r, text.data(), text.size(), &needed) == WL_OK);
  CHECK(std::strlen(text.c_str()) == needed);
  char tiny[8];
  REQUIRE(wl_result_trace_text(r, tiny, sizeof tiny, nullptr) == WL_OK);
  CHECK(std::strlen(tiny) == 7);

  const std::string colored = (dir / "c.ply").string();
  CHECK(wl_result_write_colored(r, back, colored.c_str(), WL_FORMAT_PLY_ASCII) == WL_OK);
  CHECK(wl_result_write_colored(r, s.cloud, nullptr, WL_FORMAT_PLY_ASCII) == WL_INVALID_ARGUMENT);

  const std::string lp = (dir / "pred.labels").string();
  REQUIRE(wl_labels_write(pred, lp.c_str()) == WL_OK);
  wl_labels* reread = nullptr;
  REQUIRE(wl_labels_read(lp.c_str(), &reread) == WL_OK);
  wl_report same;
  REQUIRE(wl_evaluate(reread, pred, 0.0, &same) == WL_OK);
  CHECK(same.oa == 1.0);
  CHECK(same.kappa == doctest::Approx(1.0));
  CHECK(same.elapsed_seconds == 0.0);

  wl_labels_free(reread);
  wl_labels_free(pred);
  wl_result_free(r);
  wl_cloud_free(back);
}

TEST_CASE("angular step estimate through the C API") {
  Synth s;
  double est = 0.0;
  REQUIRE(wl_estimate_angular_step(s.cloud, nullptr, &est) == WL_OK);
  const double truth = wl_synth_spec_default().angular_step;
  CHECK(std::abs(est - truth) <= 0.25 * truth);
}

TEST_CASE("labels and reports") {
  const uint8_t v[4] = {0, 1, 1, 0};
  wl_labels* l = nullptr;
  REQUIRE(wl_labels_create(v, 4, &l) == WL_OK);
  wl_label x;
  REQUIRE(wl_labels_get(l, 1, &x) == WL_OK);
  CHECK(x == WL_LEAF);
  CHECK(wl_labels_get(l, 4, &x) == WL_INVALID_ARGUMENT);
  const uint8_t bad[1] = {2};
  wl_labels* b = nullptr;
  CHECK(wl_labels_create(bad, 1, &b) == WL_INVALID_ARGUMENT);
  const uint8_t three[3] = {0, 1, 1};
  REQUIRE(wl_labels_create(three, 3, &b) == WL_OK);
  wl_report r;
  CHECK(wl_evaluate(l, b, 0.0, &r) == WL_INVALID_ARGUMENT);
  wl_labels_free(b);
  wl_labels_free(l);

  REQUIRE(wl_report_from_counts(635815, 384086, 43053, 1592, 1.901, &r) == WL_OK);
  CHECK(std::abs(r.oa - 0.9580) <= 5e-4);
  CHECK(std::abs(r.kappa - 0.9113) <= 5e-4);
  CHECK(std::abs(r.mcc - 0.9144) <= 5e-4);
  CHECK(std::round(r.ms_per_million) == 1786);
  size_t needed = 0;
  char buf[512];
  REQUIRE(wl_report_format(&r, WL_REPORT_KV, buf, sizeof buf, &needed) == WL_OK);
  CHECK(std::string(buf).find("tp=635815") != std::string::npos);
  REQUIRE(wl_report_format(&r, WL_REPORT_TEXT, buf, sizeof buf, &needed) == WL_OK);
  CHECK(std::string(buf).find("0.958") != std::string::npos);

  REQUIRE(wl_report_from_counts(5, 0, 0, 0, 0.0, &r) == WL_OK);
  CHECK(r.kappa_degenerate == 1);
  CHECK(r.mcc_degenerate == 1);
  CHECK(wl_report_from_counts(0, 0, 0, 0, 0.0, &r) == WL_INVALID_ARGUMENT);
}

TEST_CASE("empty class surfaces as its own status") {
  wl_point pts[300];
  for (int i = 0; i < 50; ++i)
    for (int k = 0; k < 6; ++k) pts[i * 6 + k] = {10.0 + i, 0.0, 0.004 * k, 50.0};
  wl_cloud* c = nullptr;
  REQUIRE(wl_cloud_create(pts, 300, nullptr, &c) == WL_OK);
  wl_result* r = nullptr;
  CHECK(wl_classify(c, 1e-3, nullptr, &r) == WL_EMPTY_CLASS);
  CHECK(r == nullptr);
  CHECK(wl_classify(c, 0.0, nullptr, &r) == WL_INVALID_ARGUMENT);
  wl_cloud_free(c);
}

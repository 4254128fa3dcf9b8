#include "doctest.h"
#include "tree_fixtures.hpp"
#include "woodleaf/metrics.hpp"

#include <cmath>

using namespace woodleaf;
using woodleaf::testing::kTrees;

namespace {

using L = ClassLabel;

ConfusionCounts counts_of(const woodleaf::testing::TreeFixture& t) {
  return {t.true_leaf, t.true_wood, t.false_leaf, t.false_wood};
}

}  // namespace

TEST_CASE("confusion: identity and total swap") {
  const std::vector<L> ref{L::Leaf, L::Leaf, L::Leaf, L::Wood, L::Wood};
  CHECK(confusion(ref, ref) == ConfusionCounts{3, 2, 0, 0});
  const std::vector<L> swapped{L::Wood, L::Wood, L::Wood, L::Leaf, L::Leaf};
  CHECK(confusion(swapped, ref) == ConfusionCounts{0, 0, 2, 3});
}

TEST_CASE("confusion guards") {
  CHECK_THROWS_AS(confusion(std::vector<L>{L::Leaf}, std::vector<L>{L::Leaf, L::Wood}), Error);
  CHECK_THROWS_AS(confusion(std::vector<L>{L::Unassigned}, std::vector<L>{L::Leaf}), Error);
}

TEST_CASE("tree 5 labels reproduce the reference counts") {
  const auto& t = kTrees[4];
  REQUIRE(t.tree == 5);
  std::vector<L> pred, ref;
  pred.reserve(t.total);
  ref.reserve(t.total);
  const auto push = [&](std::uint64_t n, L p, L r) { pred.insert(pred.end(), n, p), ref.insert(ref.end(), n, r); };
  push(t.true_wood, L::Wood, L::Wood);
  push(t.false_wood, L::Wood, L::Leaf);
  push(t.true_leaf, L::Leaf, L::Leaf);
  push(t.false_leaf, L::Leaf, L::Wood);
  const auto c = confusion(pred, ref);
  CHECK(c == ConfusionCounts{635815, 384086, 43053, 1592});
  CHECK(c.total() == 1064546);
  CHECK(c.tn + c.fp == t.standard_wood);
  CHECK(c.tp + c.fn == t.standard_leaf);
}

TEST_CASE("hand-evaluated indicators") {
  const ConfusionCounts c{2, 1, 1, 0};
  CHECK(overall_accuracy(c) == 0.75);
  CHECK(kappa(c).value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mcc(c).value == doctest::Approx(2.0 / std::sqrt(12.0)).epsilon(1e-12));
  CHECK_FALSE(kappa(c).degenerate);
  CHECK_FALSE(mcc(c).degenerate);
}

TEST_CASE("perfect classification with mixed classes") {
  const ConfusionCounts c{7, 3, 0, 0};
  CHECK(overall_accuracy(c) == 1.0);
  CHECK(kappa(c).value == doctest::Approx(1.0));
  CHECK(mcc(c).value == doctest::Approx(1.0));
}

TEST_CASE("single-class inputs are flagged degenerate") {
  const ConfusionCounts all_leaf{5, 0, 0, 0};
  CHECK(overall_accuracy(all_leaf) == 1.0);
  CHECK(kappa(all_leaf).degenerate);
  CHECK(kappa(all_leaf).value == 0.0);
  CHECK(mcc(all_leaf).degenerate);
  CHECK(mcc(all_leaf).value == 0.0);
  CHECK_THROWS_AS(overall_accuracy(ConfusionCounts{}), Error);
}

TEST_CASE("all 24 reference trees within 5e-4") {
  for (const auto& t : kTrees) {
    CAPTURE(t.tree);
    const auto c = counts_of(t);
    CHECK(c.total() == t.total);
    CHECK(std::abs(overall_accuracy(c) - t.oa) <= 5e-4);
    CHECK(std::abs(kappa(c).value - t.kappa) <= 5e-4);
    CHECK(std::abs(mcc(c).value - t.mcc) <= 5e-4);
  }
}

TEST_CASE("tree 5 indicators at four-decimal precision") {
  const auto c = counts_of(kTrees[4]);
  // The counts give 0.958062; the reference 0.9580 is truncated, not rounded.
  CHECK(overall_accuracy(c) == doctest::Approx(1019901.0 / 1064546.0).epsilon(1e-15));
  CHECK(overall_accuracy(c) - 0.9580 >= 0.0);
  CHECK(overall_accuracy(c) - 0.9580 < 1e-4);
  CHECK(std::abs(kappa(c).value - 0.9113) <= 5e-4);
  CHECK(std::abs(mcc(c).value - 0.9144) <= 5e-4);
}

TEST_CASE("billion-point counts do not overflow") {
  const ConfusionCounts c{600'000'000, 350'000'000, 30'000'000, 20'000'000};
  const double m = mcc(c).value;
  CHECK(std::isfinite(m));
  CHECK(m > 0.8);
  CHECK(m < 1.0);
}

TEST_CASE("throughput") {
  const auto t5 = throughput_report(1.901, 1064546);
  CHECK(std::round(t5.ms_per_million) == 1786);
  CHECK(throughput_report(1.0, 1000000).ms_per_million == doctest::Approx(1000.0));
  CHECK(throughput_report(2.0, 1000000).points_per_second == doctest::Approx(500000.0));
  CHECK_THROWS_AS(throughput_report(0.0, 10), Error);
  for (const auto& t : kTrees) {
    CAPTURE(t.tree);
    CHECK(std::abs(throughput_report(t.time_ms / 1000.0, t.total).ms_per_million - t.ms_per_million) <= 1.0);
  }
}

TEST_CASE("report formatting") {
  const auto r = make_report({2, 1, 1, 0}, 0.5);
  const auto kv = format_report_kv(r);
  CHECK(kv.find("tp=2\n") != std::string::npos);
  CHECK(kv.find("oa=0.750000\n") != std::string::npos);
  CHECK(kv.find("kappa=0.500000\n") != std::string::npos);
  CHECK(kv.find("mcc=0.577350\n") != std::string::npos);
  CHECK(kv.find("elapsed_ms=500.000\n") != std::string::npos);
  const auto text = format_report_text(r);
  CHECK(text.find("OA") != std::string::npos);
  CHECK(text.find("0.7500") != std::string::npos);
  CHECK(format_report_text(make_report({4, 0, 0, 0})).find("undefined") != std::string::npos);
}

#include <doctest.h>

#include <fstream>
#include <nlohmann/json.hpp>

#include "lightfc/error.hpp"
#include "lightfc/metrics.hpp"
#include "lightfc/random.hpp"
#include "oracles.hpp"

using namespace lightfc;

namespace {

std::vector<Box> repeat(const Box& b, std::size_t n) { return std::vector<Box>(n, b); }

BoxTrack track_of(const std::vector<Box>& v) { return BoxTrack(v.begin(), v.end()); }

std::vector<Box> random_boxes(Rng& rng, std::size_t n) {
  std::vector<Box> v;
  for (std::size_t i = 0; i < n; ++i)
    v.push_back({rng.uniform(0, 200), rng.uniform(0, 200), rng.uniform(5, 80), rng.uniform(5, 80)});
  return v;
}

}  // namespace

TEST_CASE("success: perfect tracking scores 20/21") {
  const auto gt = repeat({10, 20, 30, 40}, 12);
  const Curve c = success_curve(gt, gt);
  REQUIRE(c.values.size() == 21);
  CHECK(c.thresholds.front() == 0.0);
  CHECK(c.thresholds.back() == 1.0);
  for (std::size_t i = 0; i + 1 < 21; ++i) CHECK(c.values[i] == 1.0);
  CHECK(c.values.back() == 0.0);
  CHECK(c.summary == doctest::Approx(20.0 / 21.0).epsilon(1e-15));
}

TEST_CASE("success: disjoint tracking scores 0") {
  const Curve c = success_curve(repeat({100, 100, 10, 10}, 5), repeat({0, 0, 10, 10}, 5));
  CHECK(c.summary == 0.0);
}

TEST_CASE("success: hand-enumerated IoUs 1, 0.5 and 0") {
  const std::vector<Box> gt{{0, 0, 10, 10}, {0, 0, 10, 10}, {0, 0, 10, 10}};
  // Left half of the target: IoU 50 / 100.
  const std::vector<Box> pred{{0, 0, 10, 10}, {0, 0, 5, 10}, {50, 50, 10, 10}};
  REQUIRE(overlap(pred[1], gt[1]) == doctest::Approx(0.5));
  const Curve c = success_curve(pred, gt);
  // t in {0, .05, ..., .45}: two frames above; t = .5 .. .95: one frame; t = 1: none.
  double expected = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const double v = i < 10 ? 2.0 / 3.0 : (i < 20 ? 1.0 / 3.0 : 0.0);
    CHECK(c.values[i] == doctest::Approx(v));
    expected += v;
  }
  CHECK(c.summary == doctest::Approx(expected / 21.0));
}

TEST_CASE("precision: distances 0, 10 and 30") {
  const std::vector<Box> gt{{0, 0, 10, 10}, {0, 0, 10, 10}, {0, 0, 10, 10}};
  const std::vector<Box> pred{{0, 0, 10, 10}, {10, 0, 10, 10}, {0, 30, 10, 10}};
  const Curve c = precision_curve(pred, gt);
  REQUIRE(c.values.size() == 51);
  CHECK(c.summary == doctest::Approx(2.0 / 3.0));
  CHECK(c.values[9] == doctest::Approx(1.0 / 3.0));
  CHECK(c.values[10] == doctest::Approx(2.0 / 3.0));
  CHECK(c.values[30] == 1.0);
  CHECK(precision_curve(gt, gt).summary == 1.0);
}

TEST_CASE("precision: constant 25 px error") {
  const Curve c = precision_curve(repeat({25, 0, 10, 10}, 4), repeat({0, 0, 10, 10}, 4));
  CHECK(c.summary == 0.0);
  CHECK(c.values[24] == 0.0);
  CHECK(c.values[25] == 1.0);
}

TEST_CASE("norm precision: quarter-size diagonal error") {
  const Box gt{0, 0, 40, 20};
  const Box pred{10, 5, 40, 20};
  const Curve c = norm_precision_curve({pred}, {gt});
  REQUIRE(c.values.size() == 51);
  // sqrt(0.25^2 + 0.25^2) = 0.35355
  CHECK(c.values[35] == 0.0);
  CHECK(c.values[36] == 1.0);
  CHECK(c.summary == doctest::Approx(15.0 / 51.0));
  CHECK(norm_precision_curve({gt}, {gt}).summary == 1.0);
}

TEST_CASE("norm precision: zero-size ground truth is skipped and counted") {
  std::size_t skipped = 0;
  const Curve c = norm_precision_curve({{0, 0, 5, 5}, {0, 0, 5, 5}}, {{0, 0, 0, 5}, {0, 0, 5, 5}},
                                       &skipped);
  CHECK(skipped == 1);
  CHECK(c.summary == 1.0);
}

TEST_CASE("metrics: invariant under joint translation and scaling") {
  Rng rng(3);
  for (int n = 0; n < 20; ++n) {
    const auto gt = random_boxes(rng, 30);
    auto pred = gt;
    for (Box& b : pred) {
      b.x += rng.uniform(-15, 15);
      b.y += rng.uniform(-15, 15);
      b.w *= rng.uniform(0.7, 1.3);
    }
    const double tx = rng.uniform(-50, 50);
    auto moved = [&](std::vector<Box> v, double s) {
      for (Box& b : v) b = {s * (b.x + tx), s * (b.y - tx), s * b.w, s * b.h};
      return v;
    };
    CHECK(success_curve(moved(pred, 2.0), moved(gt, 2.0)).summary ==
          doctest::Approx(success_curve(pred, gt).summary).epsilon(1e-12));
    CHECK(norm_precision_curve(moved(pred, 2.0), moved(gt, 2.0)).summary ==
          doctest::Approx(norm_precision_curve(pred, gt).summary).epsilon(1e-12));
  }
}

TEST_CASE("metrics: curves are monotone and bounded") {
  Rng rng(4);
  const auto gt = random_boxes(rng, 50);
  const auto pred = random_boxes(rng, 50);
  const Curve s = success_curve(pred, gt);
  const Curve p = precision_curve(pred, gt);
  const Curve np = norm_precision_curve(pred, gt);
  for (std::size_t i = 1; i < s.values.size(); ++i) CHECK(s.values[i] <= s.values[i - 1]);
  for (std::size_t i = 1; i < p.values.size(); ++i) CHECK(p.values[i] >= p.values[i - 1]);
  for (std::size_t i = 1; i < np.values.size(); ++i) CHECK(np.values[i] >= np.values[i - 1]);
  for (const Curve* c : {&s, &p, &np})
    for (double v : c->values) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
}

TEST_CASE("evaluate: invalid ground truth excluded, errors on mismatch") {
  BoxTrack gt{Box{0, 0, 10, 10}, std::nullopt, Box{0, 0, 10, 10}};
  BoxTrack pred{Box{0, 0, 10, 10}, Box{0, 0, 10, 10}, std::nullopt};
  const SequenceMetrics m = evaluate_sequence("s", pred, gt);
  CHECK(m.frames == 3);
  CHECK(m.evaluated == 2);
  CHECK(m.success.values[0] == 0.5);
  CHECK_THROWS_AS(evaluate_sequence("s", pred, BoxTrack{Box{0, 0, 1, 1}}), InputError);
  CHECK_THROWS_AS(evaluate_sequence("s", BoxTrack(2), BoxTrack(2)), InputError);
}

TEST_CASE("aggregate: equal weight per sequence, order independent") {
  const auto gt = repeat({0, 0, 10, 10}, 2);
  const SequenceMetrics a = evaluate_sequence("a", track_of(gt), track_of(gt));
  std::vector<Box> long_gt = repeat({0, 0, 10, 10}, 10);
  const SequenceMetrics b =
      evaluate_sequence("b", track_of(repeat({50, 50, 10, 10}, 10)), track_of(long_gt));
  const MetricReport r = aggregate({a, b});
  CHECK(r.success.summary == doctest::Approx(0.5 * (20.0 / 21.0)));
  CHECK(r.precision.summary == doctest::Approx(0.5));
  const MetricReport swapped = aggregate({b, a});
  CHECK(swapped.success.summary == r.success.summary);
  CHECK(swapped.norm_precision.summary == r.norm_precision.summary);
}

TEST_CASE("directories: pairing and set mismatch") {
  const auto root = oracle::scratch_dir("metrics_dirs");
  std::filesystem::create_directories(root / "res");
  std::filesystem::create_directories(root / "ann" / "two");
  const std::string boxes = "1,1,10,10\n2,2,10,10\n";
  std::ofstream(root / "res" / "one.txt") << boxes;
  std::ofstream(root / "res" / "two.txt") << boxes;
  std::ofstream(root / "ann" / "one.txt") << boxes;
  std::ofstream(root / "ann" / "two" / "groundtruth.txt") << boxes;
  const MetricReport r = evaluate_directories(root / "res", root / "ann");
  REQUIRE(r.sequences.size() == 2);
  CHECK(r.sequences[0].name == "one");
  CHECK(r.success.summary == doctest::Approx(20.0 / 21.0));

  const auto j = nlohmann::json::parse(report_json(r));
  CHECK(j["format"] == "lightfc-report");
  CHECK(j["aggregate"]["sequences"] == 2);
  CHECK(j["aggregate"]["auc"].get<double>() == doctest::Approx(20.0 / 21.0));
  CHECK(j["aggregate"]["success"]["values"].size() == 21);
  CHECK(j["aggregate"]["precision"]["thresholds"].size() == 51);
  CHECK(j["sequences"][1]["name"] == "two");
  CHECK(j["sequences"][1].contains("norm_precision"));

  std::ofstream(root / "res" / "extra.txt") << boxes;
  try {
    evaluate_directories(root / "res", root / "ann");
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("extra") != std::string::npos);
  }
}

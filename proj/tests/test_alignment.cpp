#include <doctest.h>

#include <random>

#include "mymove/analytics.hpp"
#include "mymove/errors.hpp"
#include "support/oracles.hpp"

using namespace mymove;
using std::chrono::minutes;
using std::chrono::seconds;

namespace {

const Instant t0 = parse_iso("2021-05-10T10:00:00Z");

GroundTruthSegment seg(int from_s, int to_s, GtClass c, std::uint32_t steps = 0) {
  return {t0 + seconds{from_s}, t0 + seconds{to_s}, c, steps};
}

Interval span_s(int from_s, int to_s) { return {t0 + seconds{from_s}, t0 + seconds{to_s}}; }

ErrorCode error_of(auto f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("align examples") {
  std::vector<GroundTruthSegment> gt{seg(0, 600, GtClass::sitting)};
  auto a = align(span_s(100, 200), gt);
  CHECK(a.of(GtClass::sitting) == 1.0);
  CHECK(a.uncovered == 0.0);

  gt = {seg(0, 300, GtClass::standing), seg(300, 600, GtClass::stepping)};
  a = align(span_s(200, 400), gt);
  CHECK(a.of(GtClass::stepping) == doctest::Approx(0.5));
  CHECK(a.of(GtClass::standing) == doctest::Approx(0.5));

  a = align(span_s(1000, 1200), gt);
  CHECK(a.uncovered == 1.0);

  CHECK(error_of([&] { align(span_s(10, 10), gt); }) == ErrorCode::kDegenerateInterval);
  CHECK(error_of([&] { align(span_s(20, 10), gt); }) == ErrorCode::kDegenerateInterval);
}

TEST_CASE("align matches the per-second oracle on random segment sets") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<GroundTruthSegment> gt;
    int t = static_cast<int>(rng() % 50);
    while (t < 4000) {
      int len = 1 + static_cast<int>(rng() % 400);
      if (rng() % 4) gt.push_back(seg(t, t + len, static_cast<GtClass>(rng() % kGtClassCount)));
      t += len + (rng() % 3 == 0 ? static_cast<int>(rng() % 100) : 0);
    }
    int a0 = static_cast<int>(rng() % 4200);
    int a1 = a0 + 1 + static_cast<int>(rng() % 1500);
    auto got = align(span_s(a0, a1), gt);
    auto want = oracle::align_per_second(span_s(a0, a1), gt);
    double sum = got.uncovered;
    for (int c = 0; c < kGtClassCount; ++c) {
      REQUIRE(std::abs(got.fraction[c] - want.fraction[c]) < 1e-9);
      sum += got.fraction[c];
    }
    REQUIRE(std::abs(got.uncovered - want.uncovered) < 1e-9);
    REQUIRE(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("cadence examples") {
  std::vector<MinuteVitals> bins;
  for (int m = 0; m < 30; ++m) bins.push_back({t0 + minutes{m}, 100, std::nullopt});
  CHECK(cadence(bins, {t0, t0 + minutes{30}}) == doctest::Approx(100.0));

  std::vector<MinuteVitals> one{{t0, 60, std::nullopt}};
  CHECK(cadence(one, span_s(30, 60)) == doctest::Approx(60.0));

  CHECK(cadence(one, span_s(600, 700)) == 0.0);
  CHECK(error_of([&] { cadence(one, span_s(5, 5)); }) == ErrorCode::kDegenerateInterval);

  std::vector<GroundTruthSegment> gt{seg(0, 120, GtClass::stepping, 240)};
  CHECK(cadence(gt, span_s(0, 60)) == doctest::Approx(120.0));
  CHECK(cadence(gt, span_s(60, 180)) == doctest::Approx(60.0));
  CHECK(error_of([&] { cadence(gt, span_s(5, 5)); }) == ErrorCode::kDegenerateInterval);
}

TEST_CASE("watch cadence matches a per-second attribution") {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<MinuteVitals> bins;
    for (int m = 0; m < 20; ++m)
      if (rng() % 5) bins.push_back({t0 + minutes{m}, static_cast<std::uint32_t>(rng() % 150), std::nullopt});
    int a0 = static_cast<int>(rng() % 1200), a1 = a0 + 1 + static_cast<int>(rng() % 600);
    double steps = 0;
    for (int s = a0; s < a1; ++s)
      for (const auto& b : bins)
        if (t0 + seconds{s} >= b.minute_anchor && t0 + seconds{s} < b.minute_anchor + minutes{1})
          steps += b.step_count / 60.0;
    double want = steps / ((a1 - a0) / 60.0);
    REQUIRE(cadence(bins, span_s(a0, a1)) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("ground truth CSV round-trips and rejects bad rows") {
  std::vector<GroundTruthSegment> gt{seg(0, 60, GtClass::lying, 0), seg(60, 90, GtClass::biking, 12)};
  auto csv = ground_truth_csv(gt);
  CHECK(csv.rfind("start_iso,end_iso,class,steps\n", 0) == 0);
  CHECK(parse_ground_truth_csv(csv) == gt);
  CHECK_THROWS_AS(parse_ground_truth_csv("2021-05-10T10:00:00Z,2021-05-10T10:01:00Z,flying,0\n"), Error);
  CHECK_THROWS_AS(parse_ground_truth_csv("2021-05-10T10:00:00Z,2021-05-10T10:01:00Z,lying\n"), Error);
  CHECK_THROWS_AS(parse_ground_truth_csv("2021-05-10T10:01:00Z,2021-05-10T10:00:00Z,lying,0\n"), Error);
  CHECK_THROWS_AS(parse_ground_truth_csv("2021-05-10T10:00:00Z,2021-05-10T10:02:00Z,lying,0\n"
                                         "2021-05-10T10:01:00Z,2021-05-10T10:03:00Z,lying,0\n"),
                  Error);
  for (int c = 0; c < kGtClassCount; ++c)
    CHECK(gt_class_from_string(to_string(static_cast<GtClass>(c))) == static_cast<GtClass>(c));
}

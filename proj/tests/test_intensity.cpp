#include <doctest.h>

#include <cmath>

#include "mymove/analytics.hpp"
#include "mymove/errors.hpp"

using namespace mymove;

namespace {

IntensityResult classify(std::optional<double> hr, std::optional<double> gt = {}, std::optional<double> watch = {}) {
  return classify_intensity({hr, gt, watch});
}

}  // namespace

TEST_CASE("pct_hrmax uses 211 - 0.64 age") {
  CHECK(hr_max(70) == doctest::Approx(166.2));
  std::vector<double> hr{83.1};
  auto p = pct_hrmax(hr, 70);
  REQUIRE(p);
  CHECK(std::abs(*p - 50.0) <= 0.01);
  std::vector<double> several{80.0, 86.2, 83.1};
  CHECK(*pct_hrmax(several, 70) == doctest::Approx(50.0));
  std::vector<double> at_max{211.0 - 0.64 * 66};
  CHECK(*pct_hrmax(at_max, 66) == doctest::Approx(100.0));
  CHECK_FALSE(pct_hrmax({}, 70));
  for (double age : {0.0, -3.0}) {
    try {
      pct_hrmax(hr, age);
      FAIL("accepted age");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kInvalidAge);
    }
  }
}

TEST_CASE("heart-rate band boundaries") {
  CHECK(classify(63.99).band == IntensityBand::below_moderate);
  CHECK(classify(64.0).band == IntensityBand::moderate);
  CHECK(classify(70.0).band == IntensityBand::moderate);
  CHECK(classify(76.0).band == IntensityBand::moderate);
  CHECK(classify(76.01).band == IntensityBand::vigorous_candidate);
  CHECK(classify(76.01).criterion == IntensityCriterion::pct_hrmax);
}

TEST_CASE("cadence boundary") {
  CHECK(classify({}, 99.99).band == IntensityBand::below_moderate);
  auto r = classify({}, 100.0);
  CHECK(r.band == IntensityBand::moderate);
  CHECK(r.criterion == IntensityCriterion::cadence_gt);
  r = classify({}, {}, 100.0);
  CHECK(r.band == IntensityBand::moderate);
  CHECK(r.criterion == IntensityCriterion::cadence_watch);
  r = classify(30.0, 120.0);
  CHECK(r.band == IntensityBand::moderate);
  CHECK(r.criterion == IntensityCriterion::cadence_gt);
}

TEST_CASE("below moderate reports the first present criterion") {
  auto r = classify(30.0, 20.0);
  CHECK(r.band == IntensityBand::below_moderate);
  CHECK(r.criterion == IntensityCriterion::pct_hrmax);
  CHECK(classify({}, 20.0).criterion == IntensityCriterion::cadence_gt);
  CHECK(classify({}, {}, 20.0).criterion == IntensityCriterion::cadence_watch);
}

TEST_CASE("invalid measurements") {
  try {
    classify({});
    FAIL("no measurement accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNoMeasurement);
  }
  CHECK_THROWS_AS(classify(-1.0), Error);
  CHECK_THROWS_AS(classify({}, -5.0), Error);
  CHECK_THROWS_AS(classify(std::nan("")), Error);
}

TEST_CASE("heart rates in an interval come from overlapping minutes") {
  auto t0 = parse_iso("2021-05-10T10:00:00Z");
  using std::chrono::minutes;
  using std::chrono::seconds;
  std::vector<MinuteVitals> bins{{t0, 0, 70.0f}, {t0 + minutes{1}, 0, std::nullopt}, {t0 + minutes{2}, 0, 90.0f}};
  auto hr = heart_rates_in(bins, {t0 + seconds{30}, t0 + minutes{2} + seconds{1}});
  CHECK(hr == std::vector<double>{70.0, 90.0});
  CHECK(heart_rates_in(bins, {t0 + minutes{1}, t0 + minutes{2}}).empty());
}

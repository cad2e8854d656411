#include <fmt/format.h>

#include <limits>
#include <numeric>

#include "mymove/analytics.hpp"
#include "mymove/errors.hpp"

namespace mymove {

std::string_view to_string(IntensityBand b) {
  switch (b) {
    case IntensityBand::below_moderate: return "below_moderate";
    case IntensityBand::moderate: return "moderate";
    case IntensityBand::vigorous_candidate: return "vigorous_candidate";
  }
  return "below_moderate";
}

std::string_view to_string(IntensityCriterion c) {
  switch (c) {
    case IntensityCriterion::pct_hrmax: return "pct_hrmax";
    case IntensityCriterion::cadence_gt: return "cadence_gt";
    case IntensityCriterion::cadence_watch: return "cadence_watch";
  }
  return "pct_hrmax";
}

double hr_max(double age) {
  if (!(age > 0)) throw Error(ErrorCode::kInvalidAge, fmt::format("age {} is not positive", age));
  return 211.0 - 0.64 * age;
}

std::optional<double> pct_hrmax(std::span<const double> hr_samples, double age) {
  double max = hr_max(age);
  if (hr_samples.empty()) return std::nullopt;
  double mean = std::accumulate(hr_samples.begin(), hr_samples.end(), 0.0) /
                static_cast<double>(hr_samples.size());
  return mean / max * 100.0;
}

std::vector<double> heart_rates_in(std::span<const MinuteVitals> bins, const Interval& interval) {
  std::vector<double> out;
  for (const auto& b : bins) {
    if (!b.heart_rate) continue;
    if (b.minute_anchor < interval.end && b.minute_anchor + std::chrono::minutes{1} > interval.start)
      out.push_back(*b.heart_rate);
  }
  return out;
}

namespace {
void check_value(const std::optional<double>& v, std::string_view name, double upper) {
  if (v && (!(*v >= 0) || *v > upper))
    throw Error(ErrorCode::kInvalidArgument, fmt::format("{} = {} out of range", name, *v));
}
}  // namespace

IntensityResult classify_intensity(const IntensityMeasurement& m) {
  if (!m.pct_hrmax && !m.cadence_gt && !m.cadence_watch)
    throw Error(ErrorCode::kNoMeasurement, "no heart rate or cadence for the interval");
  constexpr double kNoUpper = std::numeric_limits<double>::infinity();
  check_value(m.pct_hrmax, "pct_hrmax", 250.0);
  check_value(m.cadence_gt, "cadence_gt", kNoUpper);
  check_value(m.cadence_watch, "cadence_watch", kNoUpper);

  if (m.pct_hrmax && *m.pct_hrmax > kModerateHrHigh)
    return {IntensityBand::vigorous_candidate, IntensityCriterion::pct_hrmax};
  if (m.pct_hrmax && *m.pct_hrmax >= kModerateHrLow)
    return {IntensityBand::moderate, IntensityCriterion::pct_hrmax};
  if (m.cadence_gt && *m.cadence_gt >= kModerateCadence)
    return {IntensityBand::moderate, IntensityCriterion::cadence_gt};
  if (m.cadence_watch && *m.cadence_watch >= kModerateCadence)
    return {IntensityBand::moderate, IntensityCriterion::cadence_watch};

  IntensityCriterion first = m.pct_hrmax    ? IntensityCriterion::pct_hrmax
                             : m.cadence_gt ? IntensityCriterion::cadence_gt
                                            : IntensityCriterion::cadence_watch;
  return {IntensityBand::below_moderate, first};
}

}  // namespace mymove

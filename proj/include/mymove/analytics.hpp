#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mymove/extractor.hpp"
#include "mymove/sensor.hpp"
#include "mymove/time.hpp"
#include "mymove/types.hpp"

namespace mymove {

// ---- ground truth and alignment ------------------------------------------

enum class GtClass { sitting, lying, standing, stepping, in_vehicle, biking };
inline constexpr int kGtClassCount = 6;

std::string_view to_string(GtClass c);
std::optional<GtClass> gt_class_from_string(std::string_view s);

struct GroundTruthSegment {
  Instant start{};
  Instant end{};
  GtClass cls = GtClass::sitting;
  std::uint32_t steps = 0;
  friend bool operator==(const GroundTruthSegment&, const GroundTruthSegment&) = default;
};

/// CSV with header start_iso,end_iso,class,steps.
std::vector<GroundTruthSegment> parse_ground_truth_csv(std::string_view csv);
std::string ground_truth_csv(std::span<const GroundTruthSegment> segments);

struct Alignment {
  std::array<double, kGtClassCount> fraction{};
  double uncovered = 0.0;

  double of(GtClass c) const { return fraction[static_cast<int>(c)]; }
};

/// Fraction of the interval covered by each class. Segments must be sorted
/// and non-overlapping.
Alignment align(const Interval& interval, std::span<const GroundTruthSegment> segments);

/// Steps per minute with steps attributed in proportion to overlap.
double cadence(std::span<const MinuteVitals> bins, const Interval& interval);
double cadence(std::span<const GroundTruthSegment> segments, const Interval& interval);

// ---- intensity -------------------------------------------------------------

double hr_max(double age);
std::optional<double> pct_hrmax(std::span<const double> hr_samples, double age);
/// Heart-rate readings from minute bins that overlap the interval.
std::vector<double> heart_rates_in(std::span<const MinuteVitals> bins, const Interval& interval);

struct IntensityMeasurement {
  std::optional<double> pct_hrmax;
  std::optional<double> cadence_gt;
  std::optional<double> cadence_watch;
};

enum class IntensityBand { below_moderate, moderate, vigorous_candidate };
enum class IntensityCriterion { pct_hrmax, cadence_gt, cadence_watch };

struct IntensityResult {
  IntensityBand band = IntensityBand::below_moderate;
  IntensityCriterion criterion = IntensityCriterion::pct_hrmax;
};

std::string_view to_string(IntensityBand b);
std::string_view to_string(IntensityCriterion c);

inline constexpr double kModerateHrLow = 64.0;
inline constexpr double kModerateHrHigh = 76.0;
inline constexpr double kModerateCadence = 100.0;

IntensityResult classify_intensity(const IntensityMeasurement& m);

// ---- word error rate -------------------------------------------------------

std::vector<std::string> normalize_text(std::string_view s);
std::size_t edit_distance(std::span<const std::string> ref, std::span<const std::string> hyp);
double wer(std::string_view reference, std::string_view hypothesis);

struct WerTotals {
  std::size_t errors = 0;
  std::size_t reference_tokens = 0;
  double rate() const {
    return reference_tokens ? static_cast<double>(errors) / static_cast<double>(reference_tokens) : 0.0;
  }
};

/// Pooled over pairs: total edits over total reference tokens.
WerTotals corpus_wer(std::span<const std::string> refs, std::span<const std::string> hyps);

// ---- regression ------------------------------------------------------------

/// Row-major design matrix. Column names are reported back in results; the
/// column named "intercept" is never eliminated.
struct DesignMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  std::vector<std::string> names;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  DesignMatrix without_column(std::size_t c) const;
};

struct ParameterEstimate {
  std::string name;
  double coef = 0.0;
  double se = 0.0;
  double t = 0.0;
  double p = 0.0;
};

struct RegressionResult {
  std::vector<ParameterEstimate> params;
  std::vector<double> residuals;
  double r2 = 0.0;
  double adjusted_r2 = 0.0;
  double sigma2 = 0.0;
  double f_stat = 0.0;
  std::size_t n = 0;
  std::size_t df = 0;

  const ParameterEstimate* find(std::string_view name) const;
};

RegressionResult ols_fit(const DesignMatrix& x, std::span<const double> y);

struct EliminationStep {
  std::string dropped;
  double p = 0.0;
};

struct EliminationResult {
  RegressionResult model;
  std::vector<EliminationStep> trace;
};

inline constexpr double kDefaultAlphaKeep = 0.15;

/// Drops the least significant non-intercept predictor while its p-value is
/// at or above alpha_keep, refitting after each drop.
EliminationResult backward_eliminate(const DesignMatrix& x, std::span<const double> y,
                                     double alpha_keep = kDefaultAlphaKeep);

// ---- corpus summary --------------------------------------------------------

struct MethodCounts {
  int prompted = 0;
  int voluntary = 0;
  int total() const { return prompted + voluntary; }
  int& operator[](ReportMethod m) { return m == ReportMethod::prompted ? prompted : voluntary; }
  friend bool operator==(const MethodCounts&, const MethodCounts&) = default;
};

struct Summary {
  std::vector<std::string> participants;
  std::map<std::string, MethodCounts> reports;  // per participant
  MethodCounts reports_total;
  std::map<std::string, std::map<std::string, MethodCounts>> reports_per_day;  // pid -> date
  std::map<std::string, int> structures;                                        // reports
  // method -> structure -> completeness -> activities (compound excluded)
  std::map<std::string, std::map<std::string, std::map<std::string, int>>> time_cues;
  MethodCounts with_effort;
  MethodCounts without_effort;
  std::map<std::string, int> effort_categories;  // reports
  std::map<std::string, int> semantics;          // activities
  std::map<std::string, int> activity_types;     // activities
  std::map<std::string, std::map<std::string, double>> wear_hours;  // pid -> date -> hours
};

struct WearMinutes {
  std::string participant_id;
  std::vector<Instant> minutes;  // minute anchors with the watch on
};

Summary summarize(std::span<const VerbalReport> reports,
                  std::span<const ExtractedActivity> activities,
                  std::span<const WearMinutes> wear, std::chrono::minutes utc_offset = {});

std::string summary_json(const Summary& s);
std::string summary_table(const Summary& s);

/// Three-lane timeline: ground-truth bands, self-report intervals, step bars.
std::string timeline_csv(std::span<const GroundTruthSegment> segments,
                         std::span<const ExtractedActivity> activities,
                         std::span<const MinuteVitals> bins);

}  // namespace mymove

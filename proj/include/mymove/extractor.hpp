#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mymove/lexicon.hpp"
#include "mymove/taxonomy.hpp"
#include "mymove/time.hpp"
#include "mymove/types.hpp"

namespace mymove {

enum class Structure { singleton, sequential, multitasking, compound };
enum class Completeness { none, incomplete, complete };
enum class EndAnchor { explicit_end, at_submission, unknown };
enum class Relation { sequential, simultaneous };

std::string_view to_string(Structure s);
std::string_view to_string(Completeness c);
std::string_view to_string(EndAnchor a);
std::optional<Structure> structure_from_string(std::string_view s);
std::optional<Completeness> completeness_from_string(std::string_view s);

/// A wall-clock reading as spoken. Without am/pm the 12-hour reading is
/// ambiguous and resolution tries both.
struct ClockTime {
  int hour = 0;  // 0..23 as written (1..12 when a meridiem is given)
  int minute = 0;
  std::optional<bool> pm;

  std::string to_string() const;
  friend bool operator==(const ClockTime&, const ClockTime&) = default;
};

struct TimeCue {
  Completeness completeness = Completeness::none;
  std::optional<ClockTime> start_clock;
  std::optional<ClockTime> end_clock;
  std::optional<double> duration_min;
  EndAnchor end_anchor = EndAnchor::unknown;
  bool since = false;  // "since 9:30": start clock, ends at submission

  friend bool operator==(const TimeCue&, const TimeCue&) = default;
};

struct EffortCue {
  EffortCategory category = EffortCategory::uncategorizable;
  std::optional<int> score;
  friend bool operator==(const EffortCue&, const EffortCue&) = default;
};

struct SourceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

struct Transcript {
  std::string report_id;
  std::string device_id;
  std::string participant_id;
  ReportMethod method = ReportMethod::voluntary;
  Instant submitted_at{};
  std::string text;
};

struct ActivitySpan {
  SourceSpan span;  // byte offsets into the original text
  std::optional<ActivityType> activity_type;
  std::optional<Relation> relation_to_previous;
};

struct Segmentation {
  Structure structure = Structure::singleton;
  std::vector<ActivitySpan> spans;
};

struct ExtractedActivity {
  std::string activity_id;  // "<report_id>#<index>"
  std::string report_id;
  std::string device_id;
  std::string participant_id;
  ReportMethod method = ReportMethod::voluntary;
  Instant submitted_at{};
  Structure structure = Structure::singleton;
  int index = 0;
  std::optional<ActivityType> activity_type;  // nullopt when no pattern fired
  std::optional<Semantic> semantic;
  std::optional<Interval> timespan;
  TimeCue time_cue;
  std::optional<EffortCue> effort;
  SourceSpan source_span;

  friend bool operator==(const ExtractedActivity&, const ExtractedActivity&) = default;
};

struct ExtractorConfig {
  std::chrono::minutes utc_offset{0};  // participants' local clock
  Millis future_tolerance{std::chrono::minutes{5}};
};

Segmentation segment_report(const Lexicon& lex, const Transcript& t);
std::optional<std::pair<ActivityType, Semantic>> tag_activity(const Lexicon& lex, std::string_view span);
TimeCue extract_time_cue(std::string_view text);
/// Throws FutureInterval when every reading ends after submission plus the
/// tolerance. Returns nullopt when the cue does not pin an interval.
std::optional<Interval> resolve_timespan(const TimeCue& cue, Instant submitted_at,
                                         const ExtractorConfig& cfg = {});
std::optional<EffortCue> extract_effort(const Lexicon& lex, std::string_view text);

std::vector<ExtractedActivity> extract_report(const Lexicon& lex, const Transcript& t,
                                              const ExtractorConfig& cfg = {});

/// Rewrites spoken quantities ("half an hour", "two hours", "30-minute")
/// into "<digits> <unit>" form. Exposed for tests.
std::string normalize_quantities(std::string_view folded);

}  // namespace mymove

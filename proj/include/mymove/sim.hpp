#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "mymove/analytics.hpp"
#include "mymove/extractor.hpp"
#include "mymove/records.hpp"
#include "mymove/scheduler.hpp"
#include "mymove/sensor.hpp"
#include "mymove/taxonomy.hpp"

namespace mymove {

enum class ReportPolicy { voluntary_at, respond_to_prompt, ignore };

std::string_view to_string(ReportPolicy p);
std::optional<ReportPolicy> report_policy_from_string(std::string_view s);

/// One entry of a participant's daily timeline. Times are minutes since local
/// midnight and repeat on every simulated day.
struct ScriptedActivity {
  int start_min = 0;
  int end_min = 0;
  ActivityType activity_type = ActivityType::tv;
  GtClass gt_class = GtClass::sitting;
  double steps_per_min = 0.0;
  double hr_mean = 70.0;
  std::optional<EffortCategory> effort;  // nullopt: no effort mention
  Completeness cue = Completeness::none;
  ReportPolicy report_policy = ReportPolicy::ignore;
  std::optional<int> report_at_min;  // voluntary_at; defaults to end + 2
  std::string transcript_template;   // empty: pick from the bank
};

struct WearWindow {
  int don_min = 0;
  int doff_min = 0;
};

struct ParticipantScript {
  std::string id;
  std::string device_id;
  double age = 70.0;
  double rest_hr = 70.0;
  std::vector<WearWindow> wear;
  std::vector<ScriptedActivity> timeline;
};

struct BehaviorScript {
  std::string name;
  Instant start_date{};  // local midnight of day one, as a UTC instant of the date
  std::chrono::minutes utc_offset{0};
  std::vector<ParticipantScript> participants;
};

/// Parses the YAML script schema documented in docs/format.md. Throws
/// InvalidScript on schema or consistency violations.
BehaviorScript parse_script(std::string_view yaml);
BehaviorScript load_script(const std::string& name_or_path);
void validate_script(const BehaviorScript& s);

/// Activity types that may carry the given ground-truth class.
bool gt_class_allowed(ActivityType t, GtClass c);

struct SimConfig {
  int days = 7;
  std::uint64_t seed = 1;
  Millis response_latency{std::chrono::seconds{90}};
  /// Every Nth worn minute carries an inertial window; 0 disables them.
  int inertial_stride = 1;
  bool generate_sensors = true;
  SchedulerConfig scheduler{};
};

struct LedgerEntry {
  std::string report_id;
  std::string device_id;
  std::string participant_id;
  ReportMethod method = ReportMethod::voluntary;
  Instant submitted_at{};
  ActivityType activity_type = ActivityType::tv;
  Completeness cue = Completeness::none;
  std::optional<EffortCategory> effort;
  Interval scripted{};                  // the scripted occurrence
  std::optional<Interval> expected_span;  // complete cues only
  bool ongoing = false;
};

struct ParticipantTrace {
  std::string participant_id;
  std::string device_id;
  double age = 0.0;
  std::vector<SensorBatch> batches;
  std::vector<LoggedEvent> scheduler_events;
  std::vector<VerbalReport> reports;
  std::vector<GroundTruthSegment> ground_truth;
  std::vector<LedgerEntry> ledger;
  std::vector<Instant> wear_minutes;
};

struct SimTrace {
  std::string script_name;
  std::uint64_t seed = 0;
  int days = 0;
  std::chrono::minutes utc_offset{0};
  std::vector<ParticipantTrace> participants;

  std::vector<VerbalReport> all_reports() const;
  std::vector<LedgerEntry> all_ledger() const;
};

/// Fills {activity}, {activity_past}, {time} and {effort}. Throws
/// TemplateError on any other placeholder or an unterminated brace.
std::string fill_template(std::string_view tmpl, std::string_view activity, std::string_view activity_past,
                          std::string_view time, std::string_view effort);

struct RenderContext {
  Instant start{};
  Instant end{};           // scripted end (finished) or submission (ongoing)
  Instant submitted_at{};
  bool ongoing = false;
  std::chrono::minutes utc_offset{0};
};

std::string render_transcript(const ScriptedActivity& a, const RenderContext& ctx, std::mt19937_64& rng);

/// Validates the script and the config together. Throws InvalidArgument or
/// InvalidScript.
void check_sim_config(const BehaviorScript& script, const SimConfig& cfg);

ParticipantTrace simulate_participant(const BehaviorScript& script, std::size_t index, const SimConfig& cfg);
SimTrace run(const BehaviorScript& script, const SimConfig& cfg);

/// Counts computed from the ledger and the scripted wear schedule, in the
/// same shape as summary_json.
Json expected_summary(const SimTrace& trace);

Json to_json(const LedgerEntry& e);

/// Writes batches/, reports.jsonl, scheduler.jsonl, ground_truth/, ledger.json.
void write_trace(const SimTrace& trace, const std::string& dir);

}  // namespace mymove

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mymove/analytics.hpp"
#include "mymove/extractor.hpp"
#include "mymove/records.hpp"
#include "mymove/sensor.hpp"
#include "mymove/sim.hpp"

namespace mymove {

// ---- trace files -----------------------------------------------------------

std::vector<VerbalReport> read_reports_jsonl(const std::string& path);
std::vector<ExtractedActivity> read_activities_jsonl(const std::string& path);
std::string activities_jsonl(std::span<const ExtractedActivity> activities);

LedgerEntry ledger_entry_from_json(const Json& j);

struct LedgerParticipant {
  std::string id;
  std::string device_id;
  double age = 0.0;
};

/// ledger.json as written by write_trace.
struct LedgerFile {
  std::string script;
  std::uint64_t seed = 0;
  int days = 0;
  std::chrono::minutes utc_offset{0};
  std::vector<LedgerParticipant> participants;
  std::vector<LedgerEntry> entries;
  Json expected_summary;
};

LedgerFile read_ledger(const std::string& path);

/// Paths of batches/<device>/<seq>.mymv under dir, ordered by device then
/// sequence.
std::vector<std::string> batch_files(const std::string& dir);
std::vector<SensorBatch> read_batches(const std::string& dir);

// ---- ledger comparison -----------------------------------------------------

struct Mismatch {
  std::string report_id;
  std::string field;
  std::string expected;
  std::string actual;
};

struct Agreement {
  std::size_t reports = 0;
  std::size_t type_agree = 0;
  std::size_t cue_agree = 0;
  std::size_t effort_agree = 0;
  std::size_t spans_checked = 0;
  std::size_t spans_within = 0;
  std::vector<Mismatch> mismatches;

  bool perfect() const {
    return type_agree == reports && cue_agree == reports && effort_agree == reports && spans_within == spans_checked;
  }
};

/// Each ledger entry scripts one activity, so its report must extract to a
/// single activity. Spans are checked for complete cues only.
Agreement compare_to_ledger(std::span<const LedgerEntry> ledger, std::span<const ExtractedActivity> activities,
                            Millis tolerance = std::chrono::seconds{60});
Json to_json(const Agreement& a);

// ---- per-activity metrics --------------------------------------------------

struct ActivityMetrics {
  std::string activity_id;
  std::string participant_id;
  std::string activity_type;
  Interval interval{};
  Alignment alignment;
  IntensityMeasurement measurement;
  std::optional<IntensityResult> intensity;  // nullopt when nothing was measured
};

/// Activities without a resolved timespan are skipped.
std::vector<ActivityMetrics> activity_metrics(std::span<const ExtractedActivity> activities,
                                              std::span<const GroundTruthSegment> ground_truth,
                                              std::span<const MinuteVitals> vitals, double age);

std::string alignment_csv(std::span<const ActivityMetrics> rows);
std::string intensity_csv(std::span<const ActivityMetrics> rows);

}  // namespace mymove

#include "mymove/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>

#include <fmt/format.h>

#include "mymove/codec.hpp"
#include "mymove/errors.hpp"
#include "mymove/io.hpp"

namespace mymove {

namespace fs = std::filesystem;

namespace {

template <class F>
void for_each_json_line(const std::string& path, F f) {
  std::string text = read_file_text(path);
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string_view line(text.data() + pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      f(Json::parse(line));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument, fmt::format("{}:{}: {}", path, line_no, e.what()));
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("{}:{}: {}", path, line_no, e.what()));
    }
  }
}

std::string opt_str(const std::optional<ActivityType>& t) { return t ? std::string(to_string(*t)) : "unknown"; }

std::string effort_str(const std::optional<EffortCategory>& e) { return e ? std::string(to_string(*e)) : "none"; }

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt::format("{:.4f}", *v) : ""; }

}  // namespace

std::vector<VerbalReport> read_reports_jsonl(const std::string& path) {
  std::vector<VerbalReport> out;
  for_each_json_line(path, [&](const Json& j) { out.push_back(report_from_json(j)); });
  return out;
}

std::vector<ExtractedActivity> read_activities_jsonl(const std::string& path) {
  std::vector<ExtractedActivity> out;
  for_each_json_line(path, [&](const Json& j) { out.push_back(activity_from_json(j)); });
  return out;
}

std::string activities_jsonl(std::span<const ExtractedActivity> activities) {
  std::string out;
  for (const auto& a : activities) out += to_json(a).dump() + "\n";
  return out;
}

LedgerEntry ledger_entry_from_json(const Json& j) {
  auto interval = [](const Json& v) { return Interval{parse_iso(v.at("start").get<std::string>()), parse_iso(v.at("end").get<std::string>())}; };
  auto bad = [](std::string_view what, const std::string& v) {
    return Error(ErrorCode::kInvalidArgument, fmt::format("ledger: unknown {} '{}'", what, v));
  };
  LedgerEntry e;
  e.report_id = j.at("report_id").get<std::string>();
  e.device_id = j.at("device_id").get<std::string>();
  e.participant_id = j.at("participant_id").get<std::string>();
  auto method = j.at("method").get<std::string>();
  if (auto m = report_method_from_string(method)) e.method = *m; else throw bad("method", method);
  e.submitted_at = parse_iso(j.at("submitted_at").get<std::string>());
  auto type = j.at("activity_type").get<std::string>();
  if (auto t = activity_type_from_string(type)) e.activity_type = *t; else throw bad("activity type", type);
  auto cue = j.at("time_cue").get<std::string>();
  if (auto c = completeness_from_string(cue)) e.cue = *c; else throw bad("time cue", cue);
  if (!j.at("effort").is_null()) {
    auto eff = j["effort"].get<std::string>();
    if (auto c = effort_from_string(eff)) e.effort = *c; else throw bad("effort", eff);
  }
  e.scripted = interval(j.at("scripted"));
  if (j.contains("expected_span") && !j["expected_span"].is_null()) e.expected_span = interval(j["expected_span"]);
  e.ongoing = j.value("ongoing", false);
  return e;
}

LedgerFile read_ledger(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_file_text(path));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("{}: {}", path, e.what()));
  }
  LedgerFile l;
  try {
    l.script = j.at("script").get<std::string>();
    l.seed = j.at("seed").get<std::uint64_t>();
    l.days = j.at("days").get<int>();
    l.utc_offset = std::chrono::minutes{j.at("utc_offset_minutes").get<int>()};
    for (const auto& p : j.at("participants"))
      l.participants.push_back({p.at("id").get<std::string>(), p.at("device").get<std::string>(), p.at("age").get<double>()});
    for (const auto& e : j.at("entries")) l.entries.push_back(ledger_entry_from_json(e));
    l.expected_summary = j.value("expected_summary", Json());
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("{}: {}", path, e.what()));
  }
  return l;
}

std::vector<std::string> batch_files(const std::string& dir) {
  std::vector<std::pair<std::pair<std::string, std::uint64_t>, std::string>> files;
  if (!fs::exists(dir)) return {};
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".mymv") continue;
    std::uint64_t seq = 0;
    try {
      seq = std::stoull(entry.path().stem().string());
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, fmt::format("batch file name {} is not a sequence", entry.path().string()));
    }
    files.push_back({{entry.path().parent_path().filename().string(), seq}, entry.path().string()});
  }
  std::sort(files.begin(), files.end());
  std::vector<std::string> out;
  for (auto& f : files) out.push_back(std::move(f.second));
  return out;
}

std::vector<SensorBatch> read_batches(const std::string& dir) {
  std::vector<SensorBatch> out;
  for (const auto& path : batch_files(dir)) out.push_back(decode_batch(read_file_bytes(path)));
  return out;
}

Agreement compare_to_ledger(std::span<const LedgerEntry> ledger, std::span<const ExtractedActivity> activities,
                            Millis tolerance) {
  std::map<std::string, std::vector<const ExtractedActivity*>> by_report;
  for (const auto& a : activities) by_report[a.report_id].push_back(&a);

  Agreement g;
  auto miss = [&](const LedgerEntry& e, std::string field, std::string expected, std::string actual) {
    g.mismatches.push_back({e.report_id, std::move(field), std::move(expected), std::move(actual)});
  };
  for (const auto& e : ledger) {
    ++g.reports;
    if (e.expected_span) ++g.spans_checked;
    auto it = by_report.find(e.report_id);
    if (it == by_report.end() || it->second.size() != 1) {
      miss(e, "activities", "1", it == by_report.end() ? "0" : std::to_string(it->second.size()));
      continue;
    }
    const auto& a = *it->second.front();
    if (a.activity_type == e.activity_type) ++g.type_agree;
    else miss(e, "activity_type", std::string(to_string(e.activity_type)), opt_str(a.activity_type));
    if (a.time_cue.completeness == e.cue) ++g.cue_agree;
    else miss(e, "time_cue", std::string(to_string(e.cue)), std::string(to_string(a.time_cue.completeness)));
    std::optional<EffortCategory> got = a.effort ? std::optional(a.effort->category) : std::nullopt;
    if (got == e.effort) ++g.effort_agree;
    else miss(e, "effort", effort_str(e.effort), effort_str(got));
    if (e.expected_span) {
      auto within = [&](Instant x, Instant y) { return std::chrono::abs(x - y) <= tolerance; };
      if (a.timespan && within(a.timespan->start, e.expected_span->start) && within(a.timespan->end, e.expected_span->end))
        ++g.spans_within;
      else
        miss(e, "timespan", format_iso(e.expected_span->start) + "/" + format_iso(e.expected_span->end),
             a.timespan ? format_iso(a.timespan->start) + "/" + format_iso(a.timespan->end) : "none");
    }
  }
  return g;
}

Json to_json(const Agreement& a) {
  Json j{{"reports", a.reports},
         {"activity_type_agree", a.type_agree},
         {"time_cue_agree", a.cue_agree},
         {"effort_agree", a.effort_agree},
         {"spans_checked", a.spans_checked},
         {"spans_within_tolerance", a.spans_within},
         {"perfect", a.perfect()},
         {"mismatches", Json::array()}};
  for (const auto& m : a.mismatches)
    j["mismatches"].push_back(
        Json{{"report_id", m.report_id}, {"field", m.field}, {"expected", m.expected}, {"actual", m.actual}});
  return j;
}

std::vector<ActivityMetrics> activity_metrics(std::span<const ExtractedActivity> activities,
                                              std::span<const GroundTruthSegment> ground_truth,
                                              std::span<const MinuteVitals> vitals, double age) {
  std::vector<ActivityMetrics> out;
  for (const auto& a : activities) {
    if (!a.timespan || a.timespan->empty()) continue;
    ActivityMetrics m;
    m.activity_id = a.activity_id;
    m.participant_id = a.participant_id;
    m.activity_type = opt_str(a.activity_type);
    m.interval = *a.timespan;
    m.alignment = align(m.interval, ground_truth);
    auto hr = heart_rates_in(vitals, m.interval);
    m.measurement.pct_hrmax = pct_hrmax(hr, age);
    if (!ground_truth.empty()) m.measurement.cadence_gt = cadence(ground_truth, m.interval);
    if (!vitals.empty()) m.measurement.cadence_watch = cadence(vitals, m.interval);
    try {
      m.intensity = classify_intensity(m.measurement);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoMeasurement) throw;
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::string alignment_csv(std::span<const ActivityMetrics> rows) {
  std::string out = "activity_id,participant_id,activity_type,start_iso,end_iso";
  for (int c = 0; c < kGtClassCount; ++c) out += fmt::format(",{}", to_string(static_cast<GtClass>(c)));
  out += ",uncovered\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{}", r.activity_id, r.participant_id, r.activity_type, format_iso(r.interval.start),
                       format_iso(r.interval.end));
    for (double f : r.alignment.fraction) out += fmt::format(",{:.4f}", f);
    out += fmt::format(",{:.4f}\n", r.alignment.uncovered);
  }
  return out;
}

std::string intensity_csv(std::span<const ActivityMetrics> rows) {
  std::string out = "activity_id,participant_id,activity_type,pct_hrmax,cadence_gt,cadence_watch,band,criterion\n";
  for (const auto& r : rows)
    out += fmt::format("{},{},{},{},{},{},{},{}\n", r.activity_id, r.participant_id, r.activity_type,
                       fmt_opt(r.measurement.pct_hrmax), fmt_opt(r.measurement.cadence_gt),
                       fmt_opt(r.measurement.cadence_watch), r.intensity ? to_string(r.intensity->band) : "",
                       r.intensity ? to_string(r.intensity->criterion) : "");
  return out;
}

}  // namespace mymove

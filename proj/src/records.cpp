#include "mymove/records.hpp"

#include <fmt/format.h>

#include "mymove/errors.hpp"

namespace mymove {

namespace {

[[noreturn]] void bad(std::string_view what) { throw Error(ErrorCode::kInvalidArgument, std::string(what)); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) bad("expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) bad(fmt::format("missing field '{}'", key));
  return *it;
}

std::string str(const Json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_string()) bad(fmt::format("field '{}' must be a string", key));
  return v.get<std::string>();
}

double num(const Json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_number()) bad(fmt::format("field '{}' must be a number", key));
  return v.get<double>();
}

template <typename E, typename F>
E parse_enum(const Json& j, const char* key, F from_string) {
  auto s = str(j, key);
  auto v = from_string(s);
  if (!v) bad(fmt::format("field '{}': unknown value '{}'", key, s));
  return *v;
}

std::optional<ClockTime> clock_from_json(const Json& j) {
  if (j.is_null()) return std::nullopt;
  ClockTime c;
  c.hour = static_cast<int>(num(j, "hour"));
  c.minute = static_cast<int>(num(j, "minute"));
  const auto& pm = field(j, "pm");
  if (!pm.is_null()) c.pm = pm.get<bool>();
  return c;
}

std::optional<EndAnchor> end_anchor_from_string(std::string_view s) {
  for (auto a : {EndAnchor::explicit_end, EndAnchor::at_submission, EndAnchor::unknown})
    if (to_string(a) == s) return a;
  return std::nullopt;
}

}  // namespace

std::string_view to_string(LabelField f) {
  switch (f) {
    case LabelField::activity_type: return "activity_type";
    case LabelField::semantic: return "semantic";
    case LabelField::time_cue: return "time_cue";
    case LabelField::effort: return "effort";
  }
  return "activity_type";
}

std::optional<LabelField> label_field_from_string(std::string_view s) {
  for (auto f : {LabelField::activity_type, LabelField::semantic, LabelField::time_cue, LabelField::effort})
    if (to_string(f) == s) return f;
  return std::nullopt;
}

void validate_correction_value(LabelField field, std::string_view value) {
  bool ok = false;
  switch (field) {
    case LabelField::activity_type: ok = activity_type_from_string(value).has_value(); break;
    case LabelField::semantic: ok = semantic_from_string(value).has_value(); break;
    case LabelField::time_cue: ok = completeness_from_string(value).has_value(); break;
    case LabelField::effort: ok = value == "none" || effort_from_string(value).has_value(); break;
  }
  if (!ok) bad(fmt::format("'{}' is not a valid {}", value, to_string(field)));
}

std::string label_value(const ExtractedActivity& a, LabelField field) {
  switch (field) {
    case LabelField::activity_type:
      return a.activity_type ? std::string(to_string(*a.activity_type)) : "unknown";
    case LabelField::semantic: return a.semantic ? std::string(to_string(*a.semantic)) : "unknown";
    case LabelField::time_cue: return std::string(to_string(a.time_cue.completeness));
    case LabelField::effort: return a.effort ? std::string(to_string(a.effort->category)) : "none";
  }
  return {};
}

void apply_correction(ExtractedActivity& a, const LabelCorrection& c) {
  validate_correction_value(c.field, c.new_value);
  switch (c.field) {
    case LabelField::activity_type:
      a.activity_type = activity_type_from_string(c.new_value);
      a.semantic = semantic_of(*a.activity_type);
      break;
    case LabelField::semantic: a.semantic = semantic_from_string(c.new_value); break;
    case LabelField::time_cue: a.time_cue.completeness = *completeness_from_string(c.new_value); break;
    case LabelField::effort:
      if (c.new_value == "none") {
        a.effort.reset();
      } else {
        auto cat = *effort_from_string(c.new_value);
        a.effort = EffortCue{cat, effort_score(cat)};
      }
      break;
  }
}

Json to_json(const VerbalReport& r) {
  return Json{{"report_id", r.report_id},
              {"device_id", r.device_id},
              {"participant_id", r.participant_id},
              {"method", to_string(r.method)},
              {"submitted_at", format_iso(r.submitted_at)},
              {"audio_duration_s", r.audio_duration_s},
              {"transcript", r.transcript}};
}

VerbalReport report_from_json(const Json& j) {
  VerbalReport r;
  r.report_id = str(j, "report_id");
  r.device_id = str(j, "device_id");
  r.participant_id = str(j, "participant_id");
  r.method = parse_enum<ReportMethod>(j, "method", report_method_from_string);
  r.submitted_at = parse_iso(str(j, "submitted_at"));
  r.audio_duration_s = num(j, "audio_duration_s");
  r.transcript = str(j, "transcript");
  if (r.report_id.empty() || r.device_id.empty() || r.participant_id.empty())
    bad("report_id, device_id and participant_id must be non-empty");
  return r;
}

Json to_json(const ClockTime& c) {
  return Json{{"hour", c.hour}, {"minute", c.minute}, {"pm", c.pm ? Json(*c.pm) : Json(nullptr)}};
}

Json to_json(const TimeCue& c) {
  return Json{{"completeness", to_string(c.completeness)},
              {"start_clock", c.start_clock ? to_json(*c.start_clock) : Json(nullptr)},
              {"end_clock", c.end_clock ? to_json(*c.end_clock) : Json(nullptr)},
              {"duration_min", c.duration_min ? Json(*c.duration_min) : Json(nullptr)},
              {"end_anchor", to_string(c.end_anchor)},
              {"since", c.since}};
}

TimeCue time_cue_from_json(const Json& j) {
  TimeCue c;
  c.completeness = parse_enum<Completeness>(j, "completeness", completeness_from_string);
  c.start_clock = clock_from_json(field(j, "start_clock"));
  c.end_clock = clock_from_json(field(j, "end_clock"));
  const auto& d = field(j, "duration_min");
  if (!d.is_null()) c.duration_min = d.get<double>();
  c.end_anchor = parse_enum<EndAnchor>(j, "end_anchor", end_anchor_from_string);
  c.since = field(j, "since").get<bool>();
  return c;
}

Json to_json(const ExtractedActivity& a) {
  Json j{{"activity_id", a.activity_id},
         {"report_id", a.report_id},
         {"device_id", a.device_id},
         {"participant_id", a.participant_id},
         {"method", to_string(a.method)},
         {"submitted_at", format_iso(a.submitted_at)},
         {"structure", to_string(a.structure)},
         {"index", a.index},
         {"activity_type", a.activity_type ? Json(to_string(*a.activity_type)) : Json(nullptr)},
         {"semantic", a.semantic ? Json(to_string(*a.semantic)) : Json(nullptr)}};
  j["timespan"] = a.timespan ? Json{{"start", format_iso(a.timespan->start)}, {"end", format_iso(a.timespan->end)}}
                             : Json(nullptr);
  j["time_cue"] = to_json(a.time_cue);
  j["effort"] = a.effort ? Json{{"category", to_string(a.effort->category)},
                                {"score", a.effort->score ? Json(*a.effort->score) : Json(nullptr)}}
                         : Json(nullptr);
  j["source_span"] = Json::array({a.source_span.begin, a.source_span.end});
  return j;
}

ExtractedActivity activity_from_json(const Json& j) {
  ExtractedActivity a;
  a.activity_id = str(j, "activity_id");
  a.report_id = str(j, "report_id");
  a.device_id = str(j, "device_id");
  a.participant_id = str(j, "participant_id");
  a.method = parse_enum<ReportMethod>(j, "method", report_method_from_string);
  a.submitted_at = parse_iso(str(j, "submitted_at"));
  a.structure = parse_enum<Structure>(j, "structure", structure_from_string);
  a.index = static_cast<int>(num(j, "index"));
  if (!field(j, "activity_type").is_null())
    a.activity_type = parse_enum<ActivityType>(j, "activity_type", activity_type_from_string);
  if (!field(j, "semantic").is_null()) a.semantic = parse_enum<Semantic>(j, "semantic", semantic_from_string);
  const auto& ts = field(j, "timespan");
  if (!ts.is_null()) a.timespan = Interval{parse_iso(str(ts, "start")), parse_iso(str(ts, "end"))};
  a.time_cue = time_cue_from_json(field(j, "time_cue"));
  const auto& e = field(j, "effort");
  if (!e.is_null()) {
    auto cat = parse_enum<EffortCategory>(e, "category", effort_from_string);
    a.effort = EffortCue{cat, effort_score(cat)};
  }
  const auto& span = field(j, "source_span");
  if (!span.is_array() || span.size() != 2) bad("source_span must be [begin, end]");
  a.source_span = {span[0].get<std::size_t>(), span[1].get<std::size_t>()};
  return a;
}

Json to_json(const LabelCorrection& c) {
  Json j{{"activity_id", c.activity_id}, {"field", to_string(c.field)}, {"old_value", c.old_value},
         {"new_value", c.new_value},     {"author", c.author},           {"at", format_iso(c.at)}};
  if (!c.lexicon_pattern.empty()) j["lexicon_pattern"] = c.lexicon_pattern;
  return j;
}

LabelCorrection correction_from_json(const Json& j) {
  LabelCorrection c;
  c.activity_id = str(j, "activity_id");
  c.field = parse_enum<LabelField>(j, "field", label_field_from_string);
  if (j.contains("old_value") && j["old_value"].is_string()) c.old_value = j["old_value"].get<std::string>();
  c.new_value = str(j, "new_value");
  c.author = str(j, "author");
  c.at = parse_iso(str(j, "at"));
  if (j.contains("lexicon_pattern") && j["lexicon_pattern"].is_string())
    c.lexicon_pattern = j["lexicon_pattern"].get<std::string>();
  return c;
}

Json to_json(const GroundTruthSegment& s) {
  return Json{{"start", format_iso(s.start)}, {"end", format_iso(s.end)}, {"class", to_string(s.cls)},
              {"steps", s.steps}};
}

}  // namespace mymove

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "mymove/errors.hpp"
#include "mymove/sim.hpp"

namespace mymove {

namespace bundled {
std::string_view default_script_yaml();
}

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::kInvalidScript, what); }

template <typename T>
T scalar(const YAML::Node& n, const char* key, const std::string& where) {
  if (!n[key]) invalid(fmt::format("{}: missing '{}'", where, key));
  try {
    return n[key].as<T>();
  } catch (const YAML::Exception&) {
    invalid(fmt::format("{}: '{}' has the wrong type", where, key));
  }
}

template <typename T>
T scalar_or(const YAML::Node& n, const char* key, T fallback, const std::string& where) {
  return n[key] ? scalar<T>(n, key, where) : fallback;
}

int minutes_of(const std::string& hhmm, const std::string& where) {
  try {
    return parse_hhmm(hhmm);
  } catch (const Error&) {
    invalid(fmt::format("{}: '{}' is not HH:MM", where, hhmm));
  }
}

ScriptedActivity parse_activity(const YAML::Node& n, const std::string& where, double rest_hr) {
  ScriptedActivity a;
  a.start_min = minutes_of(scalar<std::string>(n, "start", where), where);
  a.end_min = minutes_of(scalar<std::string>(n, "end", where), where);
  auto type = scalar<std::string>(n, "type", where);
  auto t = activity_type_from_string(type);
  if (!t) invalid(fmt::format("{}: unknown activity type '{}'", where, type));
  a.activity_type = *t;
  auto gt = scalar<std::string>(n, "gt", where);
  auto g = gt_class_from_string(gt);
  if (!g) invalid(fmt::format("{}: unknown ground-truth class '{}'", where, gt));
  a.gt_class = *g;
  a.steps_per_min = scalar_or<double>(n, "steps_per_min", 0.0, where);
  a.hr_mean = scalar_or<double>(n, "hr", rest_hr, where);
  auto effort = scalar_or<std::string>(n, "effort", "none", where);
  if (effort != "none") {
    auto e = effort_from_string(effort);
    if (!e) invalid(fmt::format("{}: unknown effort category '{}'", where, effort));
    a.effort = *e;
  }
  auto cue = scalar_or<std::string>(n, "cue", "none", where);
  auto c = completeness_from_string(cue);
  if (!c) invalid(fmt::format("{}: unknown cue class '{}'", where, cue));
  a.cue = *c;
  auto policy = scalar_or<std::string>(n, "report", "ignore", where);
  auto p = report_policy_from_string(policy);
  if (!p) invalid(fmt::format("{}: unknown report policy '{}'", where, policy));
  a.report_policy = *p;
  if (n["report_at"]) a.report_at_min = minutes_of(scalar<std::string>(n, "report_at", where), where);
  a.transcript_template = scalar_or<std::string>(n, "template", "", where);
  return a;
}

}  // namespace

std::string_view to_string(ReportPolicy p) {
  switch (p) {
    case ReportPolicy::voluntary_at: return "voluntary_at";
    case ReportPolicy::respond_to_prompt: return "respond_to_prompt";
    case ReportPolicy::ignore: return "ignore";
  }
  return "ignore";
}

std::optional<ReportPolicy> report_policy_from_string(std::string_view s) {
  for (auto p : {ReportPolicy::voluntary_at, ReportPolicy::respond_to_prompt, ReportPolicy::ignore})
    if (to_string(p) == s) return p;
  return std::nullopt;
}

bool gt_class_allowed(ActivityType t, GtClass c) {
  using A = ActivityType;
  using G = GtClass;
  switch (t) {
    case A::driving: return c == G::in_vehicle;
    case A::cardio: return c == G::stepping || c == G::biking;
    case A::non_exercise_stepping: return c == G::stepping;
    case A::offline_shopping: return c == G::stepping || c == G::standing;
    case A::napping: return c == G::lying || c == G::sitting;
    case A::nothing_waiting: return c != G::biking;
    case A::cleaning_arranging_carrying:
    case A::preparing_food:
    case A::gardening:
    case A::caring_for_pets:
    case A::housekeeping_other:
    case A::dressing:
    case A::personal_hygiene:
      return c == G::standing || c == G::stepping || c == G::sitting;
    case A::strength_stretching:
    case A::exercise_other:
      return c != G::in_vehicle && c != G::biking;
    default:
      return c == G::sitting || c == G::standing || c == G::lying;
  }
}

void validate_script(const BehaviorScript& s) {
  if (s.participants.empty()) invalid("script has no participants");
  std::set<std::string> ids, devices;
  for (const auto& p : s.participants) {
    const std::string where = fmt::format("participant {}", p.id);
    if (p.id.empty() || p.device_id.empty()) invalid("participant id and device are required");
    if (!ids.insert(p.id).second) invalid(fmt::format("{}: duplicate id", where));
    if (!devices.insert(p.device_id).second) invalid(fmt::format("{}: duplicate device '{}'", where, p.device_id));
    if (!(p.age > 0)) invalid(fmt::format("{}: age must be positive", where));
    int last = -1;
    for (const auto& w : p.wear) {
      if (w.don_min >= w.doff_min || w.doff_min > 1440) invalid(fmt::format("{}: wear window is empty", where));
      if (w.don_min < last) invalid(fmt::format("{}: wear windows overlap", where));
      last = w.doff_min;
    }
    auto worn = [&](int m) {
      return std::any_of(p.wear.begin(), p.wear.end(), [&](const WearWindow& w) { return m >= w.don_min && m < w.doff_min; });
    };
    last = 0;
    for (std::size_t i = 0; i < p.timeline.size(); ++i) {
      const auto& a = p.timeline[i];
      const std::string at = fmt::format("{} activity {} ({})", where, i + 1, to_string(a.activity_type));
      if (a.start_min >= a.end_min || a.end_min > 1440) invalid(fmt::format("{}: empty interval", at));
      if (a.start_min < last) invalid(fmt::format("{}: overlaps the previous activity", at));
      last = a.end_min;
      if (!gt_class_allowed(a.activity_type, a.gt_class))
        invalid(fmt::format("{}: ground-truth class {} does not fit", at, to_string(a.gt_class)));
      if (a.steps_per_min < 0 || a.steps_per_min > 250) invalid(fmt::format("{}: steps_per_min out of range", at));
      if (a.hr_mean < 30 || a.hr_mean > 220) invalid(fmt::format("{}: hr out of range", at));
      if (a.report_policy == ReportPolicy::voluntary_at) {
        int r = a.report_at_min.value_or(a.end_min + 2);
        if (r <= a.start_min || r >= 1440) invalid(fmt::format("{}: report time outside the day", at));
        if (!worn(r)) invalid(fmt::format("{}: report time falls outside wear", at));
      }
      if (!a.transcript_template.empty()) {
        try {
          fill_template(a.transcript_template, "x", "x", "x", "x");
        } catch (const Error& e) {
          invalid(fmt::format("{}: {}", at, e.what()));
        }
      }
    }
  }
}

BehaviorScript parse_script(std::string_view yaml) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml));
  } catch (const YAML::Exception& e) {
    invalid(fmt::format("YAML: {}", e.what()));
  }
  if (!root.IsMap()) invalid("script root must be a mapping");
  BehaviorScript s;
  s.name = scalar_or<std::string>(root, "name", "script", "script");
  try {
    s.start_date = parse_date(scalar<std::string>(root, "start_date", "script"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidScript) throw;
    invalid("start_date must be YYYY-MM-DD");
  }
  s.utc_offset = std::chrono::minutes{scalar_or<int>(root, "utc_offset_minutes", 0, "script")};
  const auto& ps = root["participants"];
  if (!ps || !ps.IsSequence()) invalid("'participants' must be a list");
  for (const auto& pn : ps) {
    ParticipantScript p;
    p.id = scalar<std::string>(pn, "id", "participant");
    const std::string where = fmt::format("participant {}", p.id);
    p.device_id = scalar<std::string>(pn, "device", where);
    p.age = scalar<double>(pn, "age", where);
    p.rest_hr = scalar_or<double>(pn, "rest_hr", 70.0, where);
    if (pn["wear"]) {
      for (const auto& w : pn["wear"]) {
        WearWindow ww;
        ww.don_min = minutes_of(scalar<std::string>(w, "don", where), where);
        ww.doff_min = minutes_of(scalar<std::string>(w, "doff", where), where);
        p.wear.push_back(ww);
      }
    }
    if (pn["timeline"]) {
      int i = 0;
      for (const auto& an : pn["timeline"])
        p.timeline.push_back(parse_activity(an, fmt::format("{} activity {}", where, ++i), p.rest_hr));
    }
    s.participants.push_back(std::move(p));
  }
  validate_script(s);
  return s;
}

BehaviorScript load_script(const std::string& name_or_path) {
  if (name_or_path == "default") return parse_script(bundled::default_script_yaml());
  std::ifstream in(name_or_path);
  if (!in) throw Error(ErrorCode::kStorage, fmt::format("cannot open script '{}'", name_or_path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_script(ss.str());
}

}  // namespace mymove

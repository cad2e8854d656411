#include <cmath>
#include <set>
#include <unordered_map>

#include <fmt/format.h>
#include <json.hpp>

#include "mymove/analytics.hpp"

namespace mymove {

namespace {

using ojson = nlohmann::ordered_json;

std::string local_date(Instant t, std::chrono::minutes offset) { return format_date(t + offset); }

ojson counts_json(const MethodCounts& c) {
  return ojson{{"prompted", c.prompted}, {"voluntary", c.voluntary}, {"total", c.total()}};
}

}  // namespace

Summary summarize(std::span<const VerbalReport> reports, std::span<const ExtractedActivity> activities,
                  std::span<const WearMinutes> wear, std::chrono::minutes utc_offset) {
  Summary s;
  std::set<std::string> pids;
  for (const auto& r : reports) {
    pids.insert(r.participant_id);
    s.reports[r.participant_id][r.method]++;
    s.reports_total[r.method]++;
    s.reports_per_day[r.participant_id][local_date(r.submitted_at, utc_offset)][r.method]++;
  }

  std::unordered_map<std::string, const ExtractedActivity*> first_of_report;
  for (const auto& a : activities) {
    first_of_report.try_emplace(a.report_id, &a);
    s.activity_types[a.activity_type ? std::string(to_string(*a.activity_type)) : "unknown"]++;
    if (a.semantic) s.semantics[std::string(to_string(*a.semantic))]++;
    if (a.structure != Structure::compound)
      s.time_cues[std::string(to_string(a.method))][std::string(to_string(a.structure))]
                 [std::string(to_string(a.time_cue.completeness))]++;
  }
  for (const auto& r : reports) {
    auto it = first_of_report.find(r.report_id);
    if (it == first_of_report.end()) continue;
    const auto& a = *it->second;
    s.structures[std::string(to_string(a.structure))]++;
    if (a.effort) {
      s.with_effort[r.method]++;
      s.effort_categories[std::string(to_string(a.effort->category))]++;
    } else {
      s.without_effort[r.method]++;
    }
  }

  for (const auto& w : wear) {
    pids.insert(w.participant_id);
    std::set<Instant> uniq;
    for (auto m : w.minutes) uniq.insert(floor_minute(m));
    auto& days = s.wear_hours[w.participant_id];
    for (auto m : uniq) days[local_date(m, utc_offset)] += 1.0 / 60.0;
  }
  s.participants.assign(pids.begin(), pids.end());
  return s;
}

std::string summary_json(const Summary& s) {
  ojson j;
  j["participants"] = s.participants;
  ojson reports = ojson::object();
  for (const auto& p : s.participants) {
    auto it = s.reports.find(p);
    reports[p] = counts_json(it == s.reports.end() ? MethodCounts{} : it->second);
  }
  j["reports"] = reports;
  j["reports_total"] = counts_json(s.reports_total);
  ojson per_day = ojson::object();
  for (const auto& [p, days] : s.reports_per_day)
    for (const auto& [d, c] : days) per_day[p][d] = counts_json(c);
  j["reports_per_day"] = per_day;
  j["structures"] = s.structures;
  j["time_cues"] = s.time_cues;
  j["effort"] = ojson{{"with", counts_json(s.with_effort)}, {"without", counts_json(s.without_effort)}};
  j["effort_categories"] = s.effort_categories;
  j["semantics"] = s.semantics;
  j["activity_types"] = s.activity_types;
  ojson wear = ojson::object();
  for (const auto& [p, days] : s.wear_hours)
    for (const auto& [d, h] : days) wear[p][d] = std::round(h * 1000.0) / 1000.0;
  j["wear_hours"] = wear;
  return j.dump(2);
}

std::string summary_table(const Summary& s) {
  std::string out = fmt::format("{:<10}", "method");
  for (const auto& p : s.participants) out += fmt::format(" {:>8}", p);
  out += fmt::format(" {:>8}\n", "total");
  auto row = [&](std::string_view label, auto get) {
    std::string line = fmt::format("{:<10}", label);
    for (const auto& p : s.participants) {
      auto it = s.reports.find(p);
      line += fmt::format(" {:>8}", it == s.reports.end() ? 0 : get(it->second));
    }
    return line + fmt::format(" {:>8}\n", get(s.reports_total));
  };
  out += row("prompted", [](const MethodCounts& c) { return c.prompted; });
  out += row("voluntary", [](const MethodCounts& c) { return c.voluntary; });
  out += row("total", [](const MethodCounts& c) { return c.total(); });

  out += "\ntime cues (activities)\n";
  for (const auto& [method, by_structure] : s.time_cues)
    for (const auto& [structure, by_cue] : by_structure) {
      out += fmt::format("{:<10} {:<13}", method, structure);
      for (auto c : {"complete", "incomplete", "none"}) {
        auto it = by_cue.find(c);
        out += fmt::format(" {}={}", c, it == by_cue.end() ? 0 : it->second);
      }
      out += '\n';
    }

  out += fmt::format("\neffort cues   with: {}/{}   without: {}/{}  (prompted/voluntary)\n",
                     s.with_effort.prompted, s.with_effort.voluntary, s.without_effort.prompted,
                     s.without_effort.voluntary);
  for (const auto& [p, days] : s.wear_hours) {
    double total = 0;
    for (const auto& [d, h] : days) total += h;
    out += fmt::format("wear {:<8} {:.2f} h/day over {} days\n", p, days.empty() ? 0.0 : total / days.size(),
                       days.size());
  }
  return out;
}

std::string timeline_csv(std::span<const GroundTruthSegment> segments,
                         std::span<const ExtractedActivity> activities, std::span<const MinuteVitals> bins) {
  std::string out = "lane,start_iso,end_iso,label,value\n";
  for (const auto& g : segments)
    out += fmt::format("ground_truth,{},{},{},{}\n", format_iso(g.start), format_iso(g.end), to_string(g.cls),
                       g.steps);
  for (const auto& a : activities) {
    if (!a.timespan) continue;
    out += fmt::format("self_report,{},{},{},{}\n", format_iso(a.timespan->start), format_iso(a.timespan->end),
                       a.activity_type ? to_string(*a.activity_type) : "unknown", a.activity_id);
  }
  for (const auto& b : bins)
    out += fmt::format("steps,{},{},steps,{}\n", format_iso(b.minute_anchor),
                       format_iso(b.minute_anchor + std::chrono::minutes{1}), b.step_count);
  return out;
}

}  // namespace mymove

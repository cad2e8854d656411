// Operator entry point. Output layout under --data-dir:
//   traces/   simulate: batches/, reports.jsonl, scheduler.jsonl, ground_truth/, ledger.json
//   labels/   extract: activities.jsonl
//   metrics/  align, metrics, summarize
#include <atomic>
#include <csignal>
#include <filesystem>
#include <map>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "mymove/client.hpp"
#include "mymove/errors.hpp"
#include "mymove/io.hpp"
#include "mymove/kernels.hpp"
#include "mymove/pipeline.hpp"
#include "mymove/service.hpp"
#include "mymove/sim.hpp"

using namespace mymove;
namespace fs = std::filesystem;

namespace {

std::atomic<bool> g_stop{false};
void on_signal(int) { g_stop = true; }

struct Paths {
  fs::path root;
  fs::path traces() const { return root / "traces"; }
  fs::path labels() const { return root / "labels"; }
  fs::path metrics() const { return root / "metrics"; }
  fs::path activities() const { return labels() / "activities.jsonl"; }
  fs::path ledger() const { return traces() / "ledger.json"; }
};

Lexicon load_lexicon(const std::string& extra) {
  Lexicon lex = Lexicon::bundled();
  if (!extra.empty()) lex.append(Lexicon::parse(read_file_text(extra)));
  return lex;
}

std::chrono::minutes trace_offset(const Paths& p) {
  return fs::exists(p.ledger()) ? read_ledger(p.ledger().string()).utc_offset : std::chrono::minutes{0};
}

std::vector<std::string> read_lines(const std::string& path) {
  std::string text = read_file_text(path);
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    pos = nl + 1;
  }
  return lines;
}

// device -> vitals, participant -> device mapping from the ledger
struct SensorView {
  std::map<std::string, std::vector<MinuteVitals>> vitals;
  std::map<std::string, std::string> device_of;
  std::map<std::string, double> age_of;
};

SensorView load_sensors(const Paths& p) {
  SensorView v;
  auto ledger = read_ledger(p.ledger().string());
  for (const auto& part : ledger.participants) {
    v.device_of[part.id] = part.device_id;
    v.age_of[part.id] = part.age;
  }
  for (auto& b : read_batches((p.traces() / "batches").string())) {
    auto& dst = v.vitals[b.device_id];
    dst.insert(dst.end(), b.vitals.begin(), b.vitals.end());
  }
  for (auto& [d, list] : v.vitals)
    std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) { return a.minute_anchor < b.minute_anchor; });
  return v;
}

std::vector<GroundTruthSegment> load_ground_truth(const Paths& p, const std::string& pid) {
  auto path = p.traces() / "ground_truth" / (pid + ".csv");
  if (!fs::exists(path)) return {};
  return parse_ground_truth_csv(read_file_text(path.string()));
}

// ---- subcommands -----------------------------------------------------------

struct SimulateOpts {
  std::string script = "default";
  int days = 7;
  std::uint64_t seed = 1;
  int inertial_stride = 1;
};

int cmd_simulate(const Paths& p, const SimulateOpts& o) {
  SimConfig cfg;
  cfg.days = o.days;
  cfg.seed = o.seed;
  cfg.inertial_stride = o.inertial_stride;
  auto trace = simulate_all(load_script(o.script), cfg);
  write_trace(trace, p.traces().string());
  std::size_t reports = 0, batches = 0;
  for (const auto& t : trace.participants) {
    reports += t.reports.size();
    batches += t.batches.size();
  }
  fmt::print("simulated {} participants x {} days: {} reports, {} batches -> {}\n", trace.participants.size(),
             trace.days, reports, batches, p.traces().string());
  return 0;
}

int cmd_extract(const Paths& p, const std::string& lexicon, const std::string& input) {
  auto reports = read_reports_jsonl(input.empty() ? (p.traces() / "reports.jsonl").string() : input);
  std::vector<Transcript> ts;
  ts.reserve(reports.size());
  for (const auto& r : reports)
    ts.push_back({r.report_id, r.device_id, r.participant_id, r.method, r.submitted_at, r.transcript});
  ExtractorConfig cfg;
  cfg.utc_offset = trace_offset(p);
  auto lex = load_lexicon(lexicon);
  std::vector<ExtractedActivity> all;
  for (auto& list : extract_all(lex, ts, cfg)) all.insert(all.end(), list.begin(), list.end());
  write_file_atomic(p.activities().string(), activities_jsonl(all));
  fmt::print("extracted {} activities from {} reports -> {}\n", all.size(), reports.size(), p.activities().string());
  return 0;
}

std::map<std::string, std::vector<ExtractedActivity>> activities_by_participant(const Paths& p) {
  std::map<std::string, std::vector<ExtractedActivity>> out;
  for (auto& a : read_activities_jsonl(p.activities().string())) out[a.participant_id].push_back(std::move(a));
  return out;
}

std::vector<ActivityMetrics> all_metrics(const Paths& p, const SensorView& sensors) {
  std::vector<ActivityMetrics> rows;
  for (const auto& [pid, acts] : activities_by_participant(p)) {
    auto gt = load_ground_truth(p, pid);
    auto dev = sensors.device_of.find(pid);
    std::vector<MinuteVitals> none;
    const auto& vit = dev == sensors.device_of.end() || !sensors.vitals.count(dev->second)
                          ? none
                          : sensors.vitals.at(dev->second);
    auto age = sensors.age_of.count(pid) ? sensors.age_of.at(pid) : 0.0;
    if (age <= 0) {
      spdlog::warn("no age for {}; skipping its activities", pid);
      continue;
    }
    auto m = activity_metrics(acts, gt, vit, age);
    rows.insert(rows.end(), m.begin(), m.end());
  }
  return rows;
}

int cmd_align(const Paths& p) {
  auto sensors = load_sensors(p);
  auto rows = all_metrics(p, sensors);
  write_file_atomic((p.metrics() / "alignment.csv").string(), alignment_csv(rows));
  for (const auto& [pid, acts] : activities_by_participant(p)) {
    auto dev = sensors.device_of.find(pid);
    std::vector<MinuteVitals> none;
    const auto& vit = dev == sensors.device_of.end() || !sensors.vitals.count(dev->second)
                          ? none
                          : sensors.vitals.at(dev->second);
    write_file_atomic((p.metrics() / "timeline" / (pid + ".csv")).string(),
                      timeline_csv(load_ground_truth(p, pid), acts, vit));
  }
  fmt::print("aligned {} activities -> {}\n", rows.size(), (p.metrics() / "alignment.csv").string());
  return 0;
}

int cmd_metrics(const Paths& p) {
  auto sensors = load_sensors(p);
  auto rows = all_metrics(p, sensors);
  write_file_atomic((p.metrics() / "intensity.csv").string(), intensity_csv(rows));
  std::map<std::string, int> bands;
  for (const auto& r : rows) bands[r.intensity ? std::string(to_string(r.intensity->band)) : "unmeasured"]++;
  for (const auto& [b, n] : bands) fmt::print("{:<20} {}\n", b, n);

  auto ledger = read_ledger(p.ledger().string());
  auto acts = read_activities_jsonl(p.activities().string());
  auto g = compare_to_ledger(ledger.entries, acts);
  write_file_atomic((p.metrics() / "agreement.json").string(), to_json(g).dump(2) + "\n");
  fmt::print("ledger agreement: type {}/{}, time cue {}/{}, effort {}/{}, spans {}/{}\n", g.type_agree, g.reports,
             g.cue_agree, g.reports, g.effort_agree, g.reports, g.spans_within, g.spans_checked);
  return 0;
}

int cmd_wer(const std::string& ref, const std::string& hyp, bool per_line) {
  auto refs = read_lines(ref);
  auto hyps = read_lines(hyp);
  if (refs.size() != hyps.size())
    throw Error(ErrorCode::kInvalidArgument, fmt::format("{} has {} lines, {} has {}", ref, refs.size(), hyp, hyps.size()));
  std::vector<WerPair> pairs;
  for (std::size_t i = 0; i < refs.size(); ++i)
    if (!(refs[i].empty() && hyps[i].empty())) pairs.push_back({refs[i], hyps[i]});
  auto b = wer_all(pairs);
  if (per_line)
    for (double r : b.rates) fmt::print("{:.4f}\n", r);
  fmt::print("{:.4f}\n", b.totals.rate());
  return 0;
}

int cmd_summarize(const Paths& p, const std::string& server, const std::string& token) {
  fs::path out = p.metrics() / "summary.json";
  if (!server.empty()) {
    auto j = get_json(Endpoint::parse(server, token), "/v1/summary");
    write_file_atomic(out.string(), j.dump(2) + "\n");
    fmt::print("{}\n", j.dump(2));
    if (fs::exists(p.ledger())) {
      auto ledger = read_ledger(p.ledger().string());
      if (!ledger.expected_summary.is_null())
        fmt::print("ledger check: {}\n", j == ledger.expected_summary ? "match" : "MISMATCH");
    }
    return 0;
  }
  auto reports = read_reports_jsonl((p.traces() / "reports.jsonl").string());
  auto acts = read_activities_jsonl(p.activities().string());
  auto sensors = load_sensors(p);
  std::vector<WearMinutes> wear;
  for (const auto& [pid, dev] : sensors.device_of) {
    WearMinutes w{pid, {}};
    if (sensors.vitals.count(dev))
      for (const auto& v : sensors.vitals.at(dev)) w.minutes.push_back(v.minute_anchor);
    wear.push_back(std::move(w));
  }
  auto ledger = read_ledger(p.ledger().string());
  auto s = summarize(reports, acts, wear, ledger.utc_offset);
  std::string js = summary_json(s);
  write_file_atomic(out.string(), js + "\n");
  fmt::print("{}", summary_table(s));
  if (!ledger.expected_summary.is_null()) {
    bool match = Json::parse(js) == ledger.expected_summary;
    fmt::print("ledger check: {}\n", match ? "match" : "MISMATCH");
  }
  return 0;
}

struct ServeOpts {
  std::string config, listen, token, lexicon;
};

int cmd_serve(const std::string& data_dir, bool data_dir_set, const ServeOpts& o) {
  ServiceConfig cfg = o.config.empty() ? ServiceConfig{} : ServiceConfig::from_file(o.config);
  cfg.apply_env();
  if (data_dir_set) cfg.data_dir = data_dir;
  if (!o.listen.empty()) cfg.set_listen(o.listen);
  if (!o.token.empty()) cfg.token = o.token;
  if (!o.lexicon.empty()) cfg.lexicon_path = o.lexicon;

  StudyService service(cfg);
  HttpServer server(service);
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  int port = server.start_background(cfg.host, cfg.port);
  fmt::print("listening on {}:{} data_dir={}{}\n", cfg.host, port, cfg.data_dir, cfg.token.empty() ? " (no token)" : "");
  std::fflush(stdout);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  return 0;
}

int cmd_upload(const Paths& p, const std::string& server, const std::string& token) {
  auto r = upload_trace(p.traces().string(), Endpoint::parse(server, token));
  fmt::print("devices {}, batches {} new / {} duplicate, reports {} new / {} duplicate, scheduler events {}\n",
             r.devices, r.batches_created, r.batches_duplicate, r.reports_created, r.reports_duplicate,
             r.schedule_events);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mymove: self-report labeling pipeline"};
  app.require_subcommand(1);
  app.fallthrough();
  spdlog::set_level(spdlog::level::warn);

  std::string data_dir = "mymove-out";
  std::string lexicon;
  auto* data_opt = app.add_option("--data-dir", data_dir, "Output root (traces/, labels/, metrics/)")
                       ->envname("MYMOVE_DATA_DIR");
  app.add_option("--lexicon", lexicon, "Extra lexicon rows (TSV)")->envname("MYMOVE_LEXICON");

  SimulateOpts sim;
  auto* simulate = app.add_subcommand("simulate", "Run the behavior simulator and write traces/");
  simulate->add_option("--script", sim.script, "Script name or YAML path")->envname("MYMOVE_SCRIPT");
  simulate->add_option("--days", sim.days, "Days to simulate")->envname("MYMOVE_DAYS")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "Random seed")->envname("MYMOVE_SEED");
  simulate->add_option("--inertial-stride", sim.inertial_stride, "Inertial window every Nth worn minute; 0 disables")
      ->check(CLI::NonNegativeNumber);

  std::string extract_input;
  auto* extract = app.add_subcommand("extract", "Extract activities from traces/reports.jsonl into labels/");
  extract->add_option("--input", extract_input, "Reports JSONL (default traces/reports.jsonl)");

  auto* align = app.add_subcommand("align", "Align labeled activities with ground truth into metrics/");
  auto* metrics = app.add_subcommand("metrics", "Intensity classification and ledger agreement into metrics/");

  std::string ref, hyp;
  bool per_line = false;
  auto* wer_cmd = app.add_subcommand("wer", "Word error rate of line-aligned reference and hypothesis files");
  wer_cmd->add_option("--ref", ref, "Reference transcripts, one per line")->required();
  wer_cmd->add_option("--hyp", hyp, "Hypothesis transcripts, one per line")->required();
  wer_cmd->add_flag("--per-line", per_line, "Print each pair's rate before the pooled rate");

  ServeOpts serve_opts;
  auto* serve = app.add_subcommand("serve", "Run the study service");
  serve->add_option("--config", serve_opts.config, "YAML config file")->envname("MYMOVE_CONFIG");
  serve->add_option("--listen", serve_opts.listen, "host:port (port 0 picks a free one)");
  serve->add_option("--token", serve_opts.token, "Bearer token for mutation endpoints");

  std::string server, token;
  auto* summarize_cmd = app.add_subcommand("summarize", "Corpus counts into metrics/summary.json");
  summarize_cmd->add_option("--server", server, "Fetch from a running service instead of local files")
      ->envname("MYMOVE_SERVER");
  summarize_cmd->add_option("--token", token, "Bearer token")->envname("MYMOVE_TOKEN");

  auto* upload = app.add_subcommand("upload", "Send traces/ to a running service");
  upload->add_option("--server", server, "host:port")->required()->envname("MYMOVE_SERVER");
  upload->add_option("--token", token, "Bearer token")->envname("MYMOVE_TOKEN");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Paths paths{data_dir};
  try {
    if (*simulate) return cmd_simulate(paths, sim);
    if (*extract) return cmd_extract(paths, lexicon, extract_input);
    if (*align) return cmd_align(paths);
    if (*metrics) return cmd_metrics(paths);
    if (*wer_cmd) return cmd_wer(ref, hyp, per_line);
    if (*summarize_cmd) return cmd_summarize(paths, server, token);
    if (*upload) return cmd_upload(paths, server, token);
    if (*serve) {
      serve_opts.lexicon = lexicon;
      return cmd_serve(data_dir, data_opt->count() > 0 || std::getenv("MYMOVE_DATA_DIR"), serve_opts);
    }
  } catch (const std::exception& e) {
    fmt::print(stderr, "mymove: {}\n", e.what());
    return 1;
  }
  return 2;
}

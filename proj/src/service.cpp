#include "mymove/service.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>
#include <yaml-cpp/yaml.h>

#include "mymove/codec.hpp"
#include "mymove/errors.hpp"

namespace mymove {

namespace fs = std::filesystem;

namespace {

constexpr double kMaxAudioSeconds = 120.0;

std::string path_in(const std::string& dir, const char* name) { return (fs::path(dir) / name).string(); }

bool in_range(const std::string& date, const std::optional<std::string>& from, const std::optional<std::string>& to) {
  return (!from || date >= *from) && (!to || date <= *to);
}

void check_date(const std::optional<std::string>& d) {
  if (d) parse_date(*d);  // throws InvalidArgument
}

}  // namespace

// ---- config ----------------------------------------------------------------

void ServiceConfig::set_listen(const std::string& host_port) {
  auto colon = host_port.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorCode::kInvalidArgument, fmt::format("listen '{}' is not host:port", host_port));
  host = host_port.substr(0, colon);
  try {
    port = std::stoi(host_port.substr(colon + 1));
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("listen '{}' has no valid port", host_port));
  }
  if (port < 0 || port > 65535) throw Error(ErrorCode::kInvalidArgument, fmt::format("port {} out of range", port));
}

ServiceConfig ServiceConfig::from_file(const std::string& path) {
  ServiceConfig c;
  YAML::Node n;
  try {
    n = YAML::LoadFile(path);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("config {}: {}", path, e.what()));
  }
  if (n["data_dir"]) c.data_dir = n["data_dir"].as<std::string>();
  if (n["listen"]) c.set_listen(n["listen"].as<std::string>());
  if (n["token"]) c.token = n["token"].as<std::string>();
  if (n["lexicon"]) c.lexicon_path = n["lexicon"].as<std::string>();
  if (n["utc_offset_minutes"]) c.utc_offset = std::chrono::minutes{n["utc_offset_minutes"].as<int>()};
  return c;
}

void ServiceConfig::apply_env() {
  if (const char* v = std::getenv("MYMOVE_DATA_DIR")) data_dir = v;
  if (const char* v = std::getenv("MYMOVE_LISTEN")) set_listen(v);
  if (const char* v = std::getenv("MYMOVE_TOKEN")) token = v;
  if (const char* v = std::getenv("MYMOVE_LEXICON")) lexicon_path = v;
  if (const char* v = std::getenv("MYMOVE_UTC_OFFSET_MINUTES")) utc_offset = std::chrono::minutes{std::atoi(v)};
}

// ---- service ---------------------------------------------------------------

StudyService::StudyService(ServiceConfig cfg)
    : cfg_(std::move(cfg)), lexicon_(nullptr) {
  extractor_cfg_.utc_offset = cfg_.utc_offset;
  std::error_code ec;
  fs::create_directories(cfg_.data_dir, ec);
  if (ec) throw Error(ErrorCode::kStorage, fmt::format("mkdir {}: {}", cfg_.data_dir, ec.message()));

  auto lex = std::make_shared<Lexicon>(Lexicon::bundled());
  if (!cfg_.lexicon_path.empty()) lex->append(Lexicon::parse(read_file_text(cfg_.lexicon_path)));
  lexicon_.swap(lex);

  store_ = std::make_shared<BatchStore>(std::make_shared<DirectoryBatchSink>(path_in(cfg_.data_dir, "batches")));
  devices_log_ = std::make_unique<AppendLog>(path_in(cfg_.data_dir, "devices.jsonl"));
  reports_log_ = std::make_unique<AppendLog>(path_in(cfg_.data_dir, "reports.jsonl"));
  corrections_log_ = std::make_unique<AppendLog>(path_in(cfg_.data_dir, "corrections.jsonl"));
  schedule_log_ = std::make_unique<AppendLog>(path_in(cfg_.data_dir, "schedule.jsonl"));
  overrides_log_ = std::make_unique<AppendLog>(path_in(cfg_.data_dir, "lexicon_overrides.tsv"));
  replay();
}

void StudyService::replay() {
  for (const auto& line : devices_log_->read_all()) {
    auto j = Json::parse(line);
    device_participant_[j.at("device_id").get<std::string>()] = j.at("participant_id").get<std::string>();
  }

  auto rows = overrides_log_->read_all();
  if (!rows.empty()) {
    auto lex = std::make_shared<Lexicon>(*lexicon_.snapshot());
    for (const auto& row : rows) lex->append(Lexicon::parse(row));
    lexicon_.swap(lex);
    override_rows_ = rows;
  }

  for (const auto& line : reports_log_->read_all()) {
    auto j = Json::parse(line);
    ReportRecord rec;
    rec.report = report_from_json(j.at("report"));
    for (const auto& a : j.at("activities")) rec.activities.push_back(activity_from_json(a));
    for (const auto& a : rec.activities) activity_index_[a.activity_id] = {rec.report.report_id, a.index};
    device_participant_.try_emplace(rec.report.device_id, rec.report.participant_id);
    reports_[rec.report.report_id] = std::move(rec);
  }

  for (const auto& line : corrections_log_->read_all()) {
    auto c = correction_from_json(Json::parse(line));
    corrections_[c.activity_id].push_back(std::move(c));
  }

  for (const auto& line : schedule_log_->read_all()) {
    auto j = Json::parse(line);
    schedule_seen_.insert(j.dump());
    schedule_events_[j.at("device_id").get<std::string>()].push_back(std::move(j));
  }

  fs::path bdir = path_in(cfg_.data_dir, "batches");
  if (fs::exists(bdir)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(bdir))
      if (entry.is_regular_file() && entry.path().extension() == ".mymv") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      try {
        store_->restore(decode_batch(read_file_bytes(f.string())));
      } catch (const Error& e) {
        spdlog::warn("skipping stored batch {}: {}", f.string(), e.what());
      }
    }
  }
  spdlog::info("restored {} reports, {} corrections, {} batches from {}", reports_.size(), corrections_.size(),
               store_->stored_count(), cfg_.data_dir);
}

void StudyService::register_device(const std::string& device_id, const std::string& participant_id) {
  if (device_id.empty() || participant_id.empty())
    throw Error(ErrorCode::kInvalidArgument, "device_id and participant_id are required");
  std::unique_lock lock(records_mu_);
  auto it = device_participant_.find(device_id);
  if (it != device_participant_.end()) {
    if (it->second != participant_id)
      throw Error(ErrorCode::kConflict, fmt::format("device {} belongs to {}", device_id, it->second));
    return;
  }
  devices_log_->append(Json{{"device_id", device_id}, {"participant_id", participant_id}}.dump());
  device_participant_[device_id] = participant_id;
}

ReportUpload StudyService::submit_report(const VerbalReport& report) {
  if (!std::isfinite(report.audio_duration_s) || report.audio_duration_s < 0 ||
      report.audio_duration_s > kMaxAudioSeconds)
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("audio_duration_s {} outside [0, {}]", report.audio_duration_s, kMaxAudioSeconds));

  auto check_existing = [&](const ReportRecord& rec) {
    if (!(rec.report == report))
      throw Error(ErrorCode::kConflict, fmt::format("report {} was already stored with different content", report.report_id));
    ReportUpload up{UploadStatus::duplicate, report.report_id, {}};
    std::shared_lock clock(corrections_mu_);
    for (const auto& a : rec.activities) up.activities.push_back(composed(a));
    return up;
  };
  auto check_device = [&] {
    auto it = device_participant_.find(report.device_id);
    if (it != device_participant_.end() && it->second != report.participant_id)
      throw Error(ErrorCode::kConflict, fmt::format("device {} belongs to {}", report.device_id, it->second));
  };

  {
    std::shared_lock lock(records_mu_);
    if (auto it = reports_.find(report.report_id); it != reports_.end()) return check_existing(it->second);
    check_device();
  }

  Transcript t{report.report_id, report.device_id, report.participant_id, report.method, report.submitted_at,
               report.transcript};
  auto lex = lexicon_.snapshot();
  auto activities = extract_report(*lex, t, extractor_cfg_);

  std::unique_lock lock(records_mu_);
  if (auto it = reports_.find(report.report_id); it != reports_.end()) return check_existing(it->second);
  check_device();
  if (!device_participant_.count(report.device_id)) {
    devices_log_->append(Json{{"device_id", report.device_id}, {"participant_id", report.participant_id}}.dump());
    device_participant_[report.device_id] = report.participant_id;
  }
  Json rec{{"report", to_json(report)}, {"activities", Json::array()}};
  for (const auto& a : activities) rec["activities"].push_back(to_json(a));
  reports_log_->append(rec.dump());
  for (const auto& a : activities) activity_index_[a.activity_id] = {report.report_id, a.index};
  reports_[report.report_id] = ReportRecord{report, activities};
  return {UploadStatus::created, report.report_id, std::move(activities)};
}

IngestAck StudyService::submit_batch(std::span<const std::uint8_t> bytes, SensorBatch* decoded) {
  SensorBatch batch = decode_batch(bytes);
  auto ack = store_->ingest(batch, bytes);
  if (decoded) *decoded = std::move(batch);
  return ack;
}

std::vector<std::string> StudyService::participants() const {
  std::shared_lock lock(records_mu_);
  std::set<std::string> ids;
  for (const auto& [d, p] : device_participant_) ids.insert(p);
  for (const auto& [id, rec] : reports_) ids.insert(rec.report.participant_id);
  return {ids.begin(), ids.end()};
}

std::vector<WearMinutes> StudyService::wear_for(const std::vector<std::string>& pids,
                                                const std::optional<std::string>& from,
                                                const std::optional<std::string>& to) const {
  std::map<std::string, WearMinutes> out;
  for (const auto& p : pids) out[p].participant_id = p;
  std::vector<std::pair<std::string, std::string>> devices;
  {
    std::shared_lock lock(records_mu_);
    for (const auto& [d, p] : device_participant_)
      if (out.count(p)) devices.emplace_back(d, p);
  }
  for (const auto& [d, p] : devices)
    for (const auto& v : store_->vitals(d))
      if (in_range(format_date(v.minute_anchor + cfg_.utc_offset), from, to)) out[p].minutes.push_back(v.minute_anchor);
  std::vector<WearMinutes> result;
  for (auto& [p, w] : out) result.push_back(std::move(w));
  return result;
}

Json StudyService::summary_for(const std::vector<std::string>& pids, const std::optional<std::string>& from,
                               const std::optional<std::string>& to) const {
  std::set<std::string> wanted(pids.begin(), pids.end());
  std::vector<VerbalReport> reports;
  std::vector<ExtractedActivity> activities;
  {
    std::shared_lock lock(records_mu_);
    std::shared_lock clock(corrections_mu_);
    for (const auto& [id, rec] : reports_) {
      if (!wanted.count(rec.report.participant_id)) continue;
      if (!in_range(format_date(rec.report.submitted_at + cfg_.utc_offset), from, to)) continue;
      reports.push_back(rec.report);
      for (const auto& a : rec.activities) activities.push_back(composed(a));
    }
  }
  auto s = summarize(reports, activities, wear_for(pids, from, to), cfg_.utc_offset);
  return Json::parse(summary_json(s));
}

Json StudyService::participant_summary(const std::string& participant_id, const std::optional<std::string>& from,
                                       const std::optional<std::string>& to) const {
  check_date(from);
  check_date(to);
  auto ids = participants();
  if (!std::binary_search(ids.begin(), ids.end(), participant_id))
    throw Error(ErrorCode::kNotFound, fmt::format("unknown participant {}", participant_id));
  return summary_for({participant_id}, from, to);
}

Json StudyService::corpus_summary() const { return summary_for(participants(), std::nullopt, std::nullopt); }

ExtractedActivity StudyService::composed(const ExtractedActivity& base) const {
  auto it = corrections_.find(base.activity_id);
  if (it == corrections_.end()) return base;
  ExtractedActivity a = base;
  for (const auto& c : it->second) apply_correction(a, c);
  return a;
}

std::vector<ExtractedActivity> StudyService::activities(const ActivityFilter& f) const {
  std::vector<ExtractedActivity> out;
  std::shared_lock lock(records_mu_);
  std::shared_lock clock(corrections_mu_);
  for (const auto& [id, rec] : reports_) {
    const auto& r = rec.report;
    if (f.participant_id && r.participant_id != *f.participant_id) continue;
    if (f.device_id && r.device_id != *f.device_id) continue;
    if (f.report_id && r.report_id != *f.report_id) continue;
    if (f.method && r.method != *f.method) continue;
    for (const auto& base : rec.activities) {
      auto a = composed(base);
      if (f.activity_type && label_value(a, LabelField::activity_type) != *f.activity_type) continue;
      out.push_back(std::move(a));
    }
  }
  return out;
}

ExtractedActivity StudyService::activity(const std::string& activity_id) const {
  std::shared_lock lock(records_mu_);
  auto it = activity_index_.find(activity_id);
  if (it == activity_index_.end()) throw Error(ErrorCode::kNotFound, fmt::format("unknown activity {}", activity_id));
  const auto& rec = reports_.at(it->second.first);
  std::shared_lock clock(corrections_mu_);
  return composed(rec.activities.at(static_cast<std::size_t>(it->second.second)));
}

std::optional<VerbalReport> StudyService::report(const std::string& report_id) const {
  std::shared_lock lock(records_mu_);
  auto it = reports_.find(report_id);
  if (it == reports_.end()) return std::nullopt;
  return it->second.report;
}

ExtractedActivity StudyService::put_correction(LabelCorrection c) {
  validate_correction_value(c.field, c.new_value);
  ExtractedActivity base = [&] {
    std::shared_lock lock(records_mu_);
    auto it = activity_index_.find(c.activity_id);
    if (it == activity_index_.end()) throw Error(ErrorCode::kNotFound, fmt::format("unknown activity {}", c.activity_id));
    return reports_.at(it->second.first).activities.at(static_cast<std::size_t>(it->second.second));
  }();

  std::optional<std::string> override_row;
  std::shared_ptr<Lexicon> next_lexicon;
  if (!c.lexicon_pattern.empty()) {
    if (c.lexicon_pattern.find_first_of("\t\r\n") != std::string::npos)
      throw Error(ErrorCode::kInvalidArgument, "lexicon pattern may not contain tabs or newlines");
    LexiconEntry e;
    e.pattern = c.lexicon_pattern;
    e.priority = kOverridePriority;
    if (c.field == LabelField::activity_type) {
      e.field = LexField::activity_type;
      e.value = static_cast<int>(*activity_type_from_string(c.new_value));
    } else if (c.field == LabelField::effort && c.new_value != "none") {
      e.field = LexField::effort;
      e.value = static_cast<int>(*effort_from_string(c.new_value));
    } else {
      throw Error(ErrorCode::kInvalidArgument, "lexicon overrides apply to activity_type or effort corrections");
    }
    next_lexicon = std::make_shared<Lexicon>(*lexicon_.snapshot());
    next_lexicon->add(e);  // throws LexiconError on a bad pattern
    override_row = Lexicon::to_tsv_row(e);
  }

  std::unique_lock lock(corrections_mu_);
  if (c.old_value.empty()) c.old_value = label_value(composed(base), c.field);
  corrections_log_->append(to_json(c).dump());
  corrections_[c.activity_id].push_back(c);
  if (override_row) {
    overrides_log_->append(*override_row);
    override_rows_.push_back(*override_row);
    lexicon_.swap(next_lexicon);
  }
  return composed(base);
}

std::vector<LabelCorrection> StudyService::corrections(const std::string& activity_id) const {
  std::shared_lock lock(corrections_mu_);
  auto it = corrections_.find(activity_id);
  return it == corrections_.end() ? std::vector<LabelCorrection>{} : it->second;
}

std::vector<std::string> StudyService::lexicon_overrides() const {
  std::shared_lock lock(corrections_mu_);
  return override_rows_;
}

std::size_t StudyService::append_schedule_events(const std::string& device_id, std::string_view jsonl) {
  std::vector<Json> events;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    auto nl = jsonl.find('\n', pos);
    auto line = jsonl.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? jsonl.size() : nl + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    Json j = Json::parse(line);
    for (const char* key : {"kind", "at", "window_start", "scheduled_at", "status"})
      if (!j.contains(key) || !j[key].is_string())
        throw Error(ErrorCode::kInvalidArgument, fmt::format("scheduler event without '{}'", key));
    parse_iso(j["at"].get<std::string>());
    if (j.contains("device_id") && j["device_id"] != device_id)
      throw Error(ErrorCode::kInvalidArgument, "event device_id does not match the path");
    j["device_id"] = device_id;
    events.push_back(std::move(j));
  }
  std::unique_lock lock(schedule_mu_);
  auto& list = schedule_events_[device_id];
  std::size_t appended = 0;
  for (auto& e : events) {
    auto line = e.dump();
    if (!schedule_seen_.insert(line).second) continue;
    schedule_log_->append(line);
    list.push_back(std::move(e));
    ++appended;
  }
  return appended;
}

Json StudyService::schedule(const std::string& device_id) const {
  bool known;
  {
    std::shared_lock lock(records_mu_);
    known = device_participant_.count(device_id) > 0;
  }
  std::shared_lock lock(schedule_mu_);
  auto it = schedule_events_.find(device_id);
  if (!known && it == schedule_events_.end())
    throw Error(ErrorCode::kNotFound, fmt::format("unknown device {}", device_id));
  Json out{{"device_id", device_id}};
  std::map<std::string, int> counts{{"deliver", 0}, {"expire", 0}, {"skip", 0}, {"defer", 0}, {"reschedule", 0}};
  std::map<std::string, int> per_day;
  Json pending = nullptr, last = nullptr;
  std::size_t n = 0;
  if (it != schedule_events_.end()) {
    n = it->second.size();
    for (const auto& e : it->second) {
      auto kind = e["kind"].get<std::string>();
      counts[kind]++;
      if (kind == "deliver") per_day[format_date(parse_iso(e["at"].get<std::string>()) + cfg_.utc_offset)]++;
      if (kind == "reschedule") pending = e;
      last = e;
    }
  }
  out["event_count"] = n;
  out["counts"] = counts;
  out["deliveries_per_day"] = per_day;
  out["pending"] = pending;
  out["last_event"] = last;
  return out;
}

}  // namespace mymove

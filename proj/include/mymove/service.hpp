#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "mymove/errors.hpp"
#include "mymove/extractor.hpp"
#include "mymove/ingest.hpp"
#include "mymove/io.hpp"
#include "mymove/lexicon.hpp"
#include "mymove/records.hpp"

namespace mymove {

struct ServiceConfig {
  std::string data_dir = "mymove-data";
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string token;         // empty leaves mutation endpoints open
  std::string lexicon_path;  // extra TSV rows appended to the bundled lexicon
  std::chrono::minutes utc_offset{0};

  /// YAML keys: data_dir, listen ("host:port"), token, lexicon, utc_offset_minutes.
  static ServiceConfig from_file(const std::string& path);
  /// MYMOVE_DATA_DIR, MYMOVE_LISTEN, MYMOVE_TOKEN, MYMOVE_LEXICON, MYMOVE_UTC_OFFSET_MINUTES.
  void apply_env();
  void set_listen(const std::string& host_port);
};

enum class UploadStatus { created, duplicate };

struct ReportUpload {
  UploadStatus status = UploadStatus::created;
  std::string report_id;
  std::vector<ExtractedActivity> activities;
};

struct ActivityFilter {
  std::optional<std::string> participant_id;
  std::optional<std::string> device_id;
  std::optional<std::string> report_id;
  std::optional<std::string> activity_type;
  std::optional<ReportMethod> method;
};

/// Upload handling, extraction, summaries, and label review over an
/// append-only record store in `data_dir`. Thread-safe.
class StudyService {
 public:
  explicit StudyService(ServiceConfig cfg);

  const ServiceConfig& config() const { return cfg_; }

  /// Binds a device to a participant. Re-registering the same pair is a
  /// no-op; a different participant is a Conflict.
  void register_device(const std::string& device_id, const std::string& participant_id);

  /// Idempotent by report_id. Different content under a known id is a
  /// Conflict; audio over the capture cap is InvalidArgument.
  ReportUpload submit_report(const VerbalReport& report);
  IngestAck submit_batch(std::span<const std::uint8_t> bytes, SensorBatch* decoded = nullptr);

  std::vector<std::string> participants() const;
  /// NotFound for an unknown participant. Dates are local YYYY-MM-DD, inclusive.
  Json participant_summary(const std::string& participant_id, const std::optional<std::string>& from = {},
                           const std::optional<std::string>& to = {}) const;
  Json corpus_summary() const;

  /// Extractor output with corrections applied, ordered by activity id.
  std::vector<ExtractedActivity> activities(const ActivityFilter& filter = {}) const;
  ExtractedActivity activity(const std::string& activity_id) const;
  std::optional<VerbalReport> report(const std::string& report_id) const;

  /// Appends the correction and returns the corrected activity. A lexicon
  /// pattern on an activity_type or effort correction adds an override row.
  ExtractedActivity put_correction(LabelCorrection correction);
  std::vector<LabelCorrection> corrections(const std::string& activity_id) const;
  std::vector<std::string> lexicon_overrides() const;

  /// Stores scheduler events uploaded by a device (to_jsonl lines). An event
  /// identical to a stored one is skipped; returns the number appended.
  std::size_t append_schedule_events(const std::string& device_id, std::string_view jsonl);
  Json schedule(const std::string& device_id) const;

  const BatchStore& batches() const { return *store_; }
  std::shared_ptr<const Lexicon> lexicon() const { return lexicon_.snapshot(); }

 private:
  struct ReportRecord {
    VerbalReport report;
    std::vector<ExtractedActivity> activities;
  };

  void replay();
  ExtractedActivity composed(const ExtractedActivity& base) const;  // caller holds corrections_mu_
  std::vector<WearMinutes> wear_for(const std::vector<std::string>& pids, const std::optional<std::string>& from,
                                    const std::optional<std::string>& to) const;
  Json summary_for(const std::vector<std::string>& pids, const std::optional<std::string>& from,
                   const std::optional<std::string>& to) const;

  ServiceConfig cfg_;
  ExtractorConfig extractor_cfg_;
  LexiconRegistry lexicon_;
  std::shared_ptr<BatchStore> store_;

  std::unique_ptr<AppendLog> devices_log_;
  std::unique_ptr<AppendLog> reports_log_;
  std::unique_ptr<AppendLog> corrections_log_;
  std::unique_ptr<AppendLog> schedule_log_;
  std::unique_ptr<AppendLog> overrides_log_;

  mutable std::shared_mutex records_mu_;
  std::map<std::string, std::string> device_participant_;
  std::map<std::string, ReportRecord> reports_;
  std::map<std::string, std::pair<std::string, int>> activity_index_;  // id -> (report, index)

  mutable std::shared_mutex corrections_mu_;
  std::map<std::string, std::vector<LabelCorrection>> corrections_;
  std::vector<std::string> override_rows_;

  mutable std::shared_mutex schedule_mu_;
  std::map<std::string, std::vector<Json>> schedule_events_;
  std::set<std::string> schedule_seen_;  // dumped events
};

/// HTTP binding of StudyService under /v1.
class HttpServer {
 public:
  explicit HttpServer(StudyService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds host:port; port 0 picks a free one. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void listen();
  void stop();
  /// bind + listen on a background thread; returns the bound port.
  int start_background(const std::string& host, int port);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

int http_status_for(ErrorCode code);

}  // namespace mymove

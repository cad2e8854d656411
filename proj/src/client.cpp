#include "mymove/client.hpp"

#include <map>

#include <httplib.h>
#include <fmt/format.h>

#include "mymove/errors.hpp"
#include "mymove/io.hpp"
#include "mymove/pipeline.hpp"

namespace mymove {

namespace {

ErrorCode code_from_body(const std::string& body) {
  try {
    auto kind = Json::parse(body).at("error").get<std::string>();
    for (auto c : {ErrorCode::kInvalidArgument, ErrorCode::kEmptyTranscript, ErrorCode::kFutureInterval,
                   ErrorCode::kLexicon, ErrorCode::kFormat, ErrorCode::kCorruptBatch, ErrorCode::kTruncatedBatch,
                   ErrorCode::kNotFound, ErrorCode::kConflict, ErrorCode::kUnauthorized})
      if (to_string(c) == kind) return c;
  } catch (const std::exception&) {
  }
  return ErrorCode::kStorage;
}

class Session {
 public:
  explicit Session(const Endpoint& ep) : client_(ep.host, ep.port) {
    client_.set_connection_timeout(5);
    client_.set_read_timeout(30);
    if (!ep.token.empty()) client_.set_bearer_token_auth(ep.token);
    where_ = fmt::format("{}:{}", ep.host, ep.port);
  }

  Json post(const std::string& path, const std::string& body, const char* type, int* status = nullptr) {
    return check(path, client_.Post(path, body, type), status);
  }
  Json get(const std::string& path) { return check(path, client_.Get(path), nullptr); }

 private:
  Json check(const std::string& path, const httplib::Result& res, int* status) {
    if (!res) throw Error(ErrorCode::kStorage, fmt::format("{}{}: {}", where_, path, httplib::to_string(res.error())));
    if (res->status >= 300)
      throw Error(code_from_body(res->body), fmt::format("{}{}: HTTP {} {}", where_, path, res->status, res->body));
    if (status) *status = res->status;
    return Json::parse(res->body);
  }

  httplib::Client client_;
  std::string where_;
};

}  // namespace

Endpoint Endpoint::parse(const std::string& url, std::string token) {
  std::string rest = url;
  if (rest.rfind("http://", 0) == 0) rest = rest.substr(7);
  while (!rest.empty() && rest.back() == '/') rest.pop_back();
  auto colon = rest.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorCode::kInvalidArgument, fmt::format("server '{}' is not host:port", url));
  Endpoint ep;
  ep.host = rest.substr(0, colon);
  try {
    ep.port = std::stoi(rest.substr(colon + 1));
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("server '{}' has no valid port", url));
  }
  ep.token = std::move(token);
  return ep;
}

UploadResult upload_trace(const std::string& trace_dir, const Endpoint& ep) {
  namespace fs = std::filesystem;
  Session s(ep);
  UploadResult r;

  auto ledger = read_ledger((fs::path(trace_dir) / "ledger.json").string());
  for (const auto& p : ledger.participants) {
    s.post("/v1/devices", Json{{"device_id", p.device_id}, {"participant_id", p.id}}.dump(), "application/json");
    ++r.devices;
  }

  for (const auto& path : batch_files((fs::path(trace_dir) / "batches").string())) {
    auto bytes = read_file_bytes(path);
    int status = 0;
    s.post("/v1/batches", std::string(bytes.begin(), bytes.end()), "application/octet-stream", &status);
    (status == 201 ? r.batches_created : r.batches_duplicate)++;
  }

  for (const auto& rep : read_reports_jsonl((fs::path(trace_dir) / "reports.jsonl").string())) {
    int status = 0;
    s.post("/v1/reports", to_json(rep).dump(), "application/json", &status);
    (status == 201 ? r.reports_created : r.reports_duplicate)++;
  }

  auto sched_path = fs::path(trace_dir) / "scheduler.jsonl";
  if (fs::exists(sched_path)) {
    std::map<std::string, std::string> by_device;
    std::string text = read_file_text(sched_path.string());
    std::size_t pos = 0;
    while (pos < text.size()) {
      auto nl = text.find('\n', pos);
      if (nl == std::string::npos) nl = text.size();
      std::string line = text.substr(pos, nl - pos);
      pos = nl + 1;
      if (line.empty()) continue;
      by_device[Json::parse(line).at("device_id").get<std::string>()] += line + "\n";
    }
    for (const auto& [device, body] : by_device)
      r.schedule_events += s.post("/v1/schedule/" + device, body, "application/x-ndjson").at("appended").get<std::size_t>();
  }
  return r;
}

Json get_json(const Endpoint& ep, const std::string& path) { return Session(ep).get(path); }

}  // namespace mymove

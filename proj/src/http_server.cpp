#include <atomic>
#include <thread>

#include <httplib.h>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "mymove/errors.hpp"
#include "mymove/service.hpp"

namespace mymove {

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kEmptyTranscript:
    case ErrorCode::kFutureInterval:
    case ErrorCode::kLexicon:
      return 400;
    case ErrorCode::kFormat:
    case ErrorCode::kCorruptBatch:
    case ErrorCode::kTruncatedBatch:
      return 422;
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kConflict:
      return 409;
    case ErrorCode::kUnauthorized:
      return 401;
    default:
      return 500;
  }
}

namespace {

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view kind, std::string_view message) {
  send_json(res, status, Json{{"error", kind}, {"message", message}});
}

Json parse_body(const httplib::Request& req) {
  try {
    return Json::parse(req.body);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("malformed JSON body: {}", e.what()));
  }
}

std::optional<std::string> query(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  return req.get_param_value(key);
}

Json activities_json(const std::vector<ExtractedActivity>& list) {
  Json arr = Json::array();
  for (const auto& a : list) arr.push_back(to_json(a));
  return arr;
}

Json gaps_json(const std::vector<GapRange>& gaps) {
  Json arr = Json::array();
  for (const auto& g : gaps) arr.push_back(Json{{"first", g.first}, {"last", g.last}});
  return arr;
}

}  // namespace

struct HttpServer::Impl {
  StudyService& service;
  httplib::Server server;
  std::thread thread;
  std::atomic<bool> bound{false};

  explicit Impl(StudyService& s) : service(s) { routes(); }

  bool authorized(const httplib::Request& req) const {
    const auto& token = service.config().token;
    if (token.empty()) return true;
    return req.get_header_value("Authorization") == "Bearer " + token;
  }

  // Wraps a handler with error mapping and, for mutations, the token check.
  template <class F>
  httplib::Server::Handler guarded(bool mutation, F f) {
    return [this, mutation, f](const httplib::Request& req, httplib::Response& res) {
      try {
        if (mutation && !authorized(req)) throw Error(ErrorCode::kUnauthorized, "missing or invalid bearer token");
        f(req, res);
      } catch (const Error& e) {
        int status = http_status_for(e.code());
        if (status == 500) spdlog::error("{} {}: {}", req.method, req.path, e.what());
        send_error(res, status, to_string(e.code()), e.what());
      } catch (const Json::exception& e) {
        send_error(res, 400, "InvalidArgument", e.what());
      } catch (const std::exception& e) {
        spdlog::error("{} {}: {}", req.method, req.path, e.what());
        send_error(res, 500, "Internal", e.what());
      }
    };
  }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Authorization, Content-Type");
      res.status = 204;
    });

    server.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, Json{{"status", "ok"}});
    });

    server.Post("/v1/devices", guarded(true, [this](const httplib::Request& req, httplib::Response& res) {
      Json j = parse_body(req);
      service.register_device(j.at("device_id").get<std::string>(), j.at("participant_id").get<std::string>());
      send_json(res, 200, j);
    }));

    server.Post("/v1/reports", guarded(true, [this](const httplib::Request& req, httplib::Response& res) {
      VerbalReport r = report_from_json(parse_body(req));
      auto up = service.submit_report(r);
      bool created = up.status == UploadStatus::created;
      send_json(res, created ? 201 : 200,
                Json{{"status", created ? "created" : "duplicate"},
                     {"report_id", up.report_id},
                     {"activities", activities_json(up.activities)}});
    }));

    server.Post("/v1/batches", guarded(true, [this](const httplib::Request& req, httplib::Response& res) {
      std::span<const std::uint8_t> bytes(reinterpret_cast<const std::uint8_t*>(req.body.data()), req.body.size());
      SensorBatch batch;
      auto ack = service.submit_batch(bytes, &batch);
      send_json(res, ack.duplicate ? 200 : 201,
                Json{{"status", ack.duplicate ? "duplicate" : "created"},
                     {"device_id", batch.device_id},
                     {"sequence", batch.sequence},
                     {"new_gaps", gaps_json(ack.new_gaps)},
                     {"gaps", gaps_json(service.batches().gaps(batch.device_id))}});
    }));

    server.Get("/v1/participants", guarded(false, [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, Json(service.participants()));
    }));

    server.Get(R"(/v1/participants/([^/]+)/summary)",
               guarded(false, [this](const httplib::Request& req, httplib::Response& res) {
                 send_json(res, 200,
                           service.participant_summary(req.matches[1], query(req, "from"), query(req, "to")));
               }));

    server.Get("/v1/summary", guarded(false, [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, service.corpus_summary());
    }));

    server.Get("/v1/activities", guarded(false, [this](const httplib::Request& req, httplib::Response& res) {
      ActivityFilter f;
      f.participant_id = query(req, "participant_id");
      f.device_id = query(req, "device_id");
      f.report_id = query(req, "report_id");
      f.activity_type = query(req, "activity_type");
      if (auto m = query(req, "method")) {
        f.method = report_method_from_string(*m);
        if (!f.method) throw Error(ErrorCode::kInvalidArgument, fmt::format("unknown method '{}'", *m));
      }
      send_json(res, 200, activities_json(service.activities(f)));
    }));

    server.Get(R"(/v1/activities/([^/]+))", guarded(false, [this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, 200, to_json(service.activity(req.matches[1])));
    }));

    server.Put(R"(/v1/activities/([^/]+)/correction)",
               guarded(true, [this](const httplib::Request& req, httplib::Response& res) {
                 Json j = parse_body(req);
                 if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "correction body must be an object");
                 j["activity_id"] = std::string(req.matches[1]);
                 if (!j.contains("at")) j["at"] = format_iso(std::chrono::time_point_cast<Millis>(std::chrono::system_clock::now()));
                 if (!j.contains("old_value")) j["old_value"] = "";
                 auto a = service.put_correction(correction_from_json(j));
                 send_json(res, 200, to_json(a));
               }));

    server.Get(R"(/v1/activities/([^/]+)/corrections)",
               guarded(false, [this](const httplib::Request& req, httplib::Response& res) {
                 service.activity(req.matches[1]);  // NotFound for unknown ids
                 Json arr = Json::array();
                 for (const auto& c : service.corrections(req.matches[1])) arr.push_back(to_json(c));
                 send_json(res, 200, arr);
               }));

    server.Get("/v1/lexicon/overrides", guarded(false, [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, Json(service.lexicon_overrides()));
    }));

    server.Post(R"(/v1/schedule/([^/]+))", guarded(true, [this](const httplib::Request& req, httplib::Response& res) {
      auto n = service.append_schedule_events(req.matches[1], req.body);
      send_json(res, 200, Json{{"device_id", std::string(req.matches[1])}, {"appended", n}});
    }));

    server.Get(R"(/v1/schedule/([^/]+))", guarded(false, [this](const httplib::Request& req, httplib::Response& res) {
      send_json(res, 200, service.schedule(req.matches[1]));
    }));
  }
};

HttpServer::HttpServer(StudyService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() {
  stop();
}

int HttpServer::bind(const std::string& host, int port) {
  int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error(ErrorCode::kStorage, fmt::format("cannot bind {}:{}", host, port));
  impl_->bound = true;
  return bound;
}

void HttpServer::listen() {
  if (!impl_->bound) throw Error(ErrorCode::kInvalidArgument, "listen() before bind()");
  impl_->server.listen_after_bind();
}

void HttpServer::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int HttpServer::start_background(const std::string& host, int port) {
  int p = bind(host, port);
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return p;
}

}  // namespace mymove

#pragma once

#include <cstddef>
#include <string>

#include "mymove/records.hpp"

namespace mymove {

struct Endpoint {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string token;

  /// Accepts "host:port" or "http://host:port".
  static Endpoint parse(const std::string& url, std::string token = {});
};

struct UploadResult {
  std::size_t devices = 0;
  std::size_t batches_created = 0;
  std::size_t batches_duplicate = 0;
  std::size_t reports_created = 0;
  std::size_t reports_duplicate = 0;
  std::size_t schedule_events = 0;
};

/// Sends a directory written by write_trace: device bindings from ledger.json,
/// then batches, reports and scheduler events. Throws Storage on transport
/// failure and maps error responses back to their ErrorCode.
UploadResult upload_trace(const std::string& trace_dir, const Endpoint& ep);

Json get_json(const Endpoint& ep, const std::string& path);

}  // namespace mymove

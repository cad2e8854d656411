#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mymove {

enum class ErrorCode {
  kInvalidArgument,
  // scheduler
  kMonotonicity,
  kProtocol,
  // sensor ingest
  kShortWindow,
  kOverfullWindow,
  kFormat,
  kCorruptBatch,
  kTruncatedBatch,
  kStorage,
  // label extraction
  kEmptyTranscript,
  kFutureInterval,
  kLexicon,
  // analytics
  kDegenerateInterval,
  kInvalidAge,
  kNoMeasurement,
  kEmptyReference,
  kRankDeficient,
  // simulation
  kInvalidScript,
  kTemplate,
  // study service
  kNotFound,
  kConflict,
  kUnauthorized,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mymove

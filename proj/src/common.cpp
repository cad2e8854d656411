#include <array>

#include "mymove/errors.hpp"
#include "mymove/types.hpp"

namespace mymove {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMonotonicity: return "MonotonicityError";
    case ErrorCode::kProtocol: return "ProtocolError";
    case ErrorCode::kShortWindow: return "ShortWindow";
    case ErrorCode::kOverfullWindow: return "OverfullWindow";
    case ErrorCode::kFormat: return "FormatError";
    case ErrorCode::kCorruptBatch: return "CorruptBatch";
    case ErrorCode::kTruncatedBatch: return "TruncatedBatch";
    case ErrorCode::kStorage: return "StorageError";
    case ErrorCode::kEmptyTranscript: return "EmptyTranscript";
    case ErrorCode::kFutureInterval: return "FutureInterval";
    case ErrorCode::kLexicon: return "LexiconError";
    case ErrorCode::kDegenerateInterval: return "DegenerateInterval";
    case ErrorCode::kInvalidAge: return "InvalidAge";
    case ErrorCode::kNoMeasurement: return "NoMeasurement";
    case ErrorCode::kEmptyReference: return "EmptyReference";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kInvalidScript: return "InvalidScript";
    case ErrorCode::kTemplate: return "TemplateError";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kConflict: return "Conflict";
    case ErrorCode::kUnauthorized: return "Unauthorized";
  }
  return "Unknown";
}

std::string_view to_string(ReportMethod m) {
  return m == ReportMethod::prompted ? "prompted" : "voluntary";
}

std::optional<ReportMethod> report_method_from_string(std::string_view s) {
  if (s == "prompted") return ReportMethod::prompted;
  if (s == "voluntary") return ReportMethod::voluntary;
  return std::nullopt;
}

namespace {
constexpr std::array<std::string_view, 6> kLocomotionNames = {
    "still", "walking", "running", "in_vehicle", "on_bicycle", "unknown"};
}

std::string_view to_string(Locomotion l) { return kLocomotionNames[static_cast<int>(l)]; }

std::optional<Locomotion> locomotion_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kLocomotionNames.size(); ++i)
    if (kLocomotionNames[i] == s) return static_cast<Locomotion>(i);
  return std::nullopt;
}

}  // namespace mymove

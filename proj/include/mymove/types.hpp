#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "mymove/time.hpp"

namespace mymove {

enum class ReportMethod { prompted, voluntary };

/// Locomotion classes reported by the on-watch activity recognizer.
enum class Locomotion { still, walking, running, in_vehicle, on_bicycle, unknown };

std::string_view to_string(ReportMethod m);
std::optional<ReportMethod> report_method_from_string(std::string_view s);

std::string_view to_string(Locomotion l);
std::optional<Locomotion> locomotion_from_string(std::string_view s);

/// One submitted recording. The transcript is attached after capture, by the
/// simulator or by an upload carrying the text.
struct VerbalReport {
  std::string report_id;
  std::string device_id;
  std::string participant_id;
  ReportMethod method = ReportMethod::voluntary;
  Instant submitted_at{};
  double audio_duration_s = 0.0;
  std::string transcript;

  friend bool operator==(const VerbalReport&, const VerbalReport&) = default;
};

}  // namespace mymove

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "mymove/time.hpp"
#include "mymove/types.hpp"

namespace mymove {

enum class SessionState { idle, prompted, recording, reviewing, submitted, discarded };

// press_play is the review-screen playback button.
enum class CaptureEvent {
  press_record,
  press_end,
  press_cancel,
  press_ok,
  prompt_shown,
  prompt_dismissed,
  press_play,
  tick,
};

inline constexpr SessionState kAllStates[] = {SessionState::idle,      SessionState::prompted,
                                              SessionState::recording, SessionState::reviewing,
                                              SessionState::submitted, SessionState::discarded};
inline constexpr CaptureEvent kAllEvents[] = {
    CaptureEvent::press_record,     CaptureEvent::press_end,  CaptureEvent::press_cancel,
    CaptureEvent::press_ok,         CaptureEvent::prompt_shown, CaptureEvent::prompt_dismissed,
    CaptureEvent::press_play,       CaptureEvent::tick};

std::string_view to_string(SessionState s);
std::string_view to_string(CaptureEvent e);

struct CaptureConfig {
  Millis max_recording{120'000};
  Millis review_timeout{8'000};
};

struct ReportSession {
  SessionState state = SessionState::idle;
  std::optional<Instant> session_start;
  std::optional<Instant> recording_start;
  std::optional<Instant> recording_end;
  std::optional<Instant> submitted_at;
  ReportMethod method = ReportMethod::voluntary;
  double audio_duration_s = 0.0;
  Instant last_interaction{};

  bool terminal() const {
    return state == SessionState::submitted || state == SessionState::discarded;
  }
  friend bool operator==(const ReportSession&, const ReportSession&) = default;
};

/// Whether `e` is a legal input in state `s`. Illegal inputs leave the
/// session untouched.
bool accepts(SessionState s, CaptureEvent e);

ReportSession transition(const ReportSession& session, CaptureEvent e, Instant now,
                         const CaptureConfig& cfg = {});

/// The report for a submitted session; nullopt for any other state.
std::optional<VerbalReport> make_report(const ReportSession& session, std::string report_id,
                                        std::string device_id);

}  // namespace mymove

#include "mymove/capture.hpp"

#include <spdlog/spdlog.h>

namespace mymove {

std::string_view to_string(SessionState s) {
  switch (s) {
    case SessionState::idle: return "idle";
    case SessionState::prompted: return "prompted";
    case SessionState::recording: return "recording";
    case SessionState::reviewing: return "reviewing";
    case SessionState::submitted: return "submitted";
    case SessionState::discarded: return "discarded";
  }
  return "?";
}

std::string_view to_string(CaptureEvent e) {
  switch (e) {
    case CaptureEvent::press_record: return "press_record";
    case CaptureEvent::press_end: return "press_end";
    case CaptureEvent::press_cancel: return "press_cancel";
    case CaptureEvent::press_ok: return "press_ok";
    case CaptureEvent::prompt_shown: return "prompt_shown";
    case CaptureEvent::prompt_dismissed: return "prompt_dismissed";
    case CaptureEvent::press_play: return "press_play";
    case CaptureEvent::tick: return "tick";
  }
  return "?";
}

bool accepts(SessionState s, CaptureEvent e) {
  using E = CaptureEvent;
  switch (s) {
    case SessionState::idle:
      return e == E::prompt_shown || e == E::press_record || e == E::tick;
    case SessionState::prompted:
      return e == E::press_record || e == E::prompt_dismissed || e == E::tick;
    case SessionState::recording:
      return e == E::press_end || e == E::press_cancel || e == E::tick;
    case SessionState::reviewing:
      return e == E::press_ok || e == E::press_cancel || e == E::press_play || e == E::tick;
    case SessionState::submitted:
    case SessionState::discarded:
      return false;
  }
  return false;
}

namespace {

double seconds(Millis d) { return static_cast<double>(d.count()) / 1000.0; }

void discard(ReportSession& s, Instant now) {
  s.state = SessionState::discarded;
  if (!s.recording_end) s.recording_end = now;
  s.audio_duration_s = 0.0;
}

}  // namespace

ReportSession transition(const ReportSession& session, CaptureEvent e, Instant now,
                         const CaptureConfig& cfg) {
  if (!accepts(session.state, e)) {
    spdlog::debug("capture: ignored {} in state {}", to_string(e), to_string(session.state));
    return session;
  }
  ReportSession s = session;
  if (!s.session_start) s.session_start = now;
  switch (s.state) {
    case SessionState::idle:
    case SessionState::prompted:
      if (e == CaptureEvent::prompt_shown) {
        s.state = SessionState::prompted;
      } else if (e == CaptureEvent::prompt_dismissed) {
        s.state = SessionState::idle;
      } else if (e == CaptureEvent::press_record) {
        s.method = s.state == SessionState::prompted ? ReportMethod::prompted : ReportMethod::voluntary;
        s.state = SessionState::recording;
        s.recording_start = now;
        s.last_interaction = now;
      }
      break;
    case SessionState::recording: {
      Millis elapsed = now - *s.recording_start;
      if (e == CaptureEvent::press_cancel) {
        discard(s, now);
      } else if (elapsed > cfg.max_recording ||
                 (e == CaptureEvent::tick && elapsed >= cfg.max_recording)) {
        discard(s, *s.recording_start + cfg.max_recording);
      } else if (e == CaptureEvent::press_end) {
        s.state = SessionState::reviewing;
        s.recording_end = now;
        s.audio_duration_s = seconds(elapsed);
        s.last_interaction = now;
      }
      break;
    }
    case SessionState::reviewing:
      if (e == CaptureEvent::press_ok) {
        s.state = SessionState::submitted;
        s.submitted_at = now;
      } else if (e == CaptureEvent::press_cancel) {
        discard(s, now);
      } else if (e == CaptureEvent::press_play) {
        s.last_interaction = now;
      } else if (now - s.last_interaction >= cfg.review_timeout) {
        s.state = SessionState::submitted;
        s.submitted_at = s.last_interaction + cfg.review_timeout;
      }
      break;
    default:
      break;
  }
  return s;
}

std::optional<VerbalReport> make_report(const ReportSession& session, std::string report_id,
                                        std::string device_id) {
  if (session.state != SessionState::submitted) return std::nullopt;
  VerbalReport r;
  r.report_id = std::move(report_id);
  r.device_id = std::move(device_id);
  r.method = session.method;
  r.submitted_at = *session.submitted_at;
  r.audio_duration_s = session.audio_duration_s;
  return r;
}

}  // namespace mymove

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mymove/time.hpp"
#include "mymove/types.hpp"

namespace mymove {

struct WearContext {
  Instant timestamp{};
  bool worn = true;
  Locomotion locomotion = Locomotion::still;
};

enum class PlanStatus { reserved, delivered, expired, skipped, deferred, consumed };
enum class EventKind { deliver, expire, skip, defer, reschedule };

// Clock-aligned blocks are the default. Rolling starts the block at the anchor.
enum class WindowPolicy { clock_aligned, rolling };

struct SchedulerConfig {
  WindowPolicy policy = WindowPolicy::clock_aligned;
  Millis block{std::chrono::hours{1}};
  Millis buffer{std::chrono::minutes{30}};
  Millis expiry{std::chrono::minutes{15}};
};

struct PromptPlan {
  Instant window_start{};
  Instant window_end{};
  Instant earliest_allowed{};
  Instant scheduled_at{};
  PlanStatus status = PlanStatus::reserved;
  std::uint64_t seed = 0;
  std::optional<Instant> delivered_at;
  Instant last_event_at{};

  friend bool operator==(const PromptPlan&, const PromptPlan&) = default;
};

struct SchedulerEvent {
  EventKind kind;
  Instant at;
  PromptPlan plan;
};

std::string_view to_string(PlanStatus s);
std::string_view to_string(EventKind k);

std::uint64_t splitmix64(std::uint64_t x);
/// Seed for the reservation that follows one made with `seed`, taken at `at`.
std::uint64_t derive_seed(std::uint64_t seed, Instant at);

PromptPlan reserve_next(Instant anchor, std::uint64_t seed, const SchedulerConfig& cfg = {});

/// Advances `plan` to `now`. Emitted events are in timestamp order. A
/// reschedule event carries the freshly reserved plan.
std::vector<SchedulerEvent> on_tick(Instant now, const WearContext& ctx, PromptPlan& plan,
                                    const SchedulerConfig& cfg = {});

/// Returns (plan after submission, next reservation).
std::pair<PromptPlan, PromptPlan> on_report_submitted(Instant now, ReportMethod method,
                                                      const PromptPlan& plan,
                                                      const SchedulerConfig& cfg = {});

struct LoggedEvent {
  std::string device_id;
  SchedulerEvent event;
};

std::string to_jsonl(const LoggedEvent& e);

/// Per-device driver. Keeps the live (delivered) prompt, the pending
/// reservation and the event log.
class PromptScheduler {
 public:
  PromptScheduler(std::string device_id, Instant start, std::uint64_t seed,
                  SchedulerConfig cfg = {});

  std::vector<SchedulerEvent> tick(Instant now, const WearContext& ctx);
  /// Returns the plan reserved as a result of the submission.
  PromptPlan submit(Instant now, ReportMethod method);

  const std::optional<PromptPlan>& live() const { return live_; }
  const std::optional<PromptPlan>& pending() const { return pending_; }
  std::optional<Instant> next_deadline() const;
  const std::vector<LoggedEvent>& log() const { return log_; }
  const std::string& device_id() const { return device_id_; }
  bool prompt_visible() const { return live_.has_value(); }

 private:
  void record(const std::vector<SchedulerEvent>& events);
  void check_order(Instant now);

  std::string device_id_;
  SchedulerConfig cfg_;
  std::optional<PromptPlan> live_;
  std::optional<PromptPlan> pending_;
  std::optional<PromptPlan> last_expired_;
  Instant last_input_{};
  std::vector<LoggedEvent> log_;
};

}  // namespace mymove

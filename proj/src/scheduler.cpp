#include "mymove/scheduler.hpp"

#include <algorithm>
#include <random>

#include <fmt/format.h>
#include <json.hpp>

#include "mymove/errors.hpp"

namespace mymove {

std::string_view to_string(PlanStatus s) {
  switch (s) {
    case PlanStatus::reserved: return "reserved";
    case PlanStatus::delivered: return "delivered";
    case PlanStatus::expired: return "expired";
    case PlanStatus::skipped: return "skipped";
    case PlanStatus::deferred: return "deferred";
    case PlanStatus::consumed: return "consumed";
  }
  return "?";
}

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::deliver: return "deliver";
    case EventKind::expire: return "expire";
    case EventKind::skip: return "skip";
    case EventKind::defer: return "defer";
    case EventKind::reschedule: return "reschedule";
  }
  return "?";
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, Instant at) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(to_epoch_ms(at))));
}

namespace {

// Longest recording plus the review timeout.
constexpr Millis kLateGrace{128'000};

Instant floor_block(Instant t, Millis block) {
  auto ms = to_epoch_ms(t);
  auto b = block.count();
  auto q = ms >= 0 ? ms / b : -((-ms + b - 1) / b);
  return from_epoch_ms(q * b);
}

}  // namespace

PromptPlan reserve_next(Instant anchor, std::uint64_t seed, const SchedulerConfig& cfg) {
  if (cfg.block <= Millis::zero()) throw Error(ErrorCode::kInvalidArgument, "block must be positive");
  PromptPlan p;
  p.seed = seed;
  p.earliest_allowed = anchor + cfg.buffer;
  p.window_start =
      cfg.policy == WindowPolicy::clock_aligned ? floor_block(anchor, cfg.block) + cfg.block : anchor;
  while (p.earliest_allowed >= p.window_start + cfg.block) p.window_start += cfg.block;
  p.window_end = p.window_start + cfg.block;

  Instant lo = std::max(p.window_start, p.earliest_allowed);
  auto range = static_cast<std::uint64_t>((p.window_end - lo).count());
  std::mt19937_64 rng(seed ^ splitmix64(static_cast<std::uint64_t>(to_epoch_ms(anchor))));
  p.scheduled_at = lo + Millis{static_cast<std::int64_t>(rng() % range)};
  p.status = PlanStatus::reserved;
  p.last_event_at = anchor;
  return p;
}

namespace {

void skip_and_reschedule(Instant now, PromptPlan& plan, const SchedulerConfig& cfg,
                         std::vector<SchedulerEvent>& out) {
  plan.status = PlanStatus::skipped;
  out.push_back({EventKind::skip, now, plan});
  PromptPlan next = reserve_next(plan.scheduled_at, derive_seed(plan.seed, plan.scheduled_at), cfg);
  next.last_event_at = now;
  out.push_back({EventKind::reschedule, now, next});
}

}  // namespace

std::vector<SchedulerEvent> on_tick(Instant now, const WearContext& ctx, PromptPlan& plan,
                                    const SchedulerConfig& cfg) {
  if (now < plan.last_event_at)
    throw Error(ErrorCode::kMonotonicity,
                fmt::format("tick at {} precedes {}", format_iso(now), format_iso(plan.last_event_at)));
  std::vector<SchedulerEvent> out;
  switch (plan.status) {
    case PlanStatus::reserved:
      plan.last_event_at = now;
      if (now < plan.scheduled_at) break;
      if (now >= plan.window_end) {
        skip_and_reschedule(now, plan, cfg, out);
      } else if (!ctx.worn) {
        plan.status = PlanStatus::deferred;
        out.push_back({EventKind::defer, now, plan});
      } else if (ctx.locomotion == Locomotion::in_vehicle) {
        skip_and_reschedule(now, plan, cfg, out);
      } else {
        plan.status = PlanStatus::delivered;
        plan.delivered_at = now;
        out.push_back({EventKind::deliver, now, plan});
      }
      break;
    case PlanStatus::deferred:
      plan.last_event_at = now;
      if (now >= plan.window_end) {
        skip_and_reschedule(now, plan, cfg, out);
      } else if (ctx.worn && ctx.locomotion != Locomotion::in_vehicle) {
        plan.status = PlanStatus::delivered;
        plan.delivered_at = now;
        out.push_back({EventKind::deliver, now, plan});
      }
      break;
    case PlanStatus::delivered: {
      plan.last_event_at = now;
      Instant due = *plan.delivered_at + cfg.expiry;
      if (now >= due) {
        plan.status = PlanStatus::expired;
        out.push_back({EventKind::expire, due, plan});
      }
      break;
    }
    default:
      throw Error(ErrorCode::kProtocol,
                  fmt::format("tick on a plan in state {}", to_string(plan.status)));
  }
  return out;
}

std::pair<PromptPlan, PromptPlan> on_report_submitted(Instant now, ReportMethod method,
                                                      const PromptPlan& plan,
                                                      const SchedulerConfig& cfg) {
  PromptPlan after = plan;
  if (method == ReportMethod::prompted) {
    if (plan.status != PlanStatus::delivered)
      throw Error(ErrorCode::kProtocol, "prompted submission without a delivered prompt");
    after.status = PlanStatus::consumed;
    after.last_event_at = now;
  }
  PromptPlan next = reserve_next(now, derive_seed(plan.seed, now), cfg);
  return {after, next};
}

std::string to_jsonl(const LoggedEvent& e) {
  nlohmann::ordered_json j;
  j["device_id"] = e.device_id;
  j["kind"] = to_string(e.event.kind);
  j["at"] = format_iso(e.event.at);
  j["window_start"] = format_iso(e.event.plan.window_start);
  j["scheduled_at"] = format_iso(e.event.plan.scheduled_at);
  j["status"] = to_string(e.event.plan.status);
  return j.dump();
}

PromptScheduler::PromptScheduler(std::string device_id, Instant start, std::uint64_t seed,
                                 SchedulerConfig cfg)
    : device_id_(std::move(device_id)), cfg_(cfg), last_input_(start) {
  pending_ = reserve_next(start, seed, cfg_);
  record({{EventKind::reschedule, start, *pending_}});
}

void PromptScheduler::check_order(Instant now) {
  if (now < last_input_)
    throw Error(ErrorCode::kMonotonicity,
                fmt::format("{}: input at {} precedes {}", device_id_, format_iso(now),
                            format_iso(last_input_)));
  last_input_ = now;
}

void PromptScheduler::record(const std::vector<SchedulerEvent>& events) {
  for (const auto& e : events) log_.push_back({device_id_, e});
}

std::vector<SchedulerEvent> PromptScheduler::tick(Instant now, const WearContext& ctx) {
  check_order(now);
  std::vector<SchedulerEvent> out;
  if (live_) {
    auto ev = on_tick(now, ctx, *live_, cfg_);
    if (live_->status == PlanStatus::expired) {
      last_expired_ = live_;
      live_.reset();
    }
    out.insert(out.end(), ev.begin(), ev.end());
  }
  // A long gap between ticks can skip several blocks in a row.
  for (int guard = 0; pending_ && guard < 10000; ++guard) {
    auto ev = on_tick(now, ctx, *pending_, cfg_);
    out.insert(out.end(), ev.begin(), ev.end());
    bool again = false;
    for (const auto& e : ev) {
      if (e.kind == EventKind::deliver) {
        live_ = *pending_;
        pending_ = reserve_next(now, derive_seed(pending_->seed, now), cfg_);
        out.push_back({EventKind::reschedule, now, *pending_});
      } else if (e.kind == EventKind::reschedule) {
        pending_ = e.plan;
        again = true;
      }
    }
    if (!again) break;
  }
  record(out);
  return out;
}

PromptPlan PromptScheduler::submit(Instant now, ReportMethod method) {
  check_order(now);
  std::uint64_t seed = pending_ ? pending_->seed : 0;
  if (method == ReportMethod::prompted) {
    if (live_) {
      auto [done, next] = on_report_submitted(now, method, *live_, cfg_);
      (void)done;
      live_.reset();
      pending_ = next;
    } else if (last_expired_ && now <= *last_expired_->delivered_at + cfg_.expiry + kLateGrace) {
      // Recording started while the prompt was visible; it expired before submission.
      auto [done, next] = on_report_submitted(now, ReportMethod::voluntary, *last_expired_, cfg_);
      (void)done;
      last_expired_.reset();
      pending_ = next;
    } else {
      throw Error(ErrorCode::kProtocol,
                  fmt::format("{}: prompted submission at {} with no delivered prompt", device_id_,
                              format_iso(now)));
    }
  } else {
    PromptPlan basis = pending_ ? *pending_ : PromptPlan{};
    basis.seed = seed;
    pending_ = on_report_submitted(now, method, basis, cfg_).second;
  }
  record({{EventKind::reschedule, now, *pending_}});
  return *pending_;
}

std::optional<Instant> PromptScheduler::next_deadline() const {
  std::optional<Instant> best;
  auto take = [&](Instant t) {
    if (!best || t < *best) best = t;
  };
  if (live_) take(*live_->delivered_at + cfg_.expiry);
  if (pending_) {
    if (pending_->status == PlanStatus::reserved) take(pending_->scheduled_at);
    else if (pending_->status == PlanStatus::deferred) take(pending_->window_end);
  }
  return best;
}

}  // namespace mymove

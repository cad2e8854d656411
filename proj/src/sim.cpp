#include "mymove/sim.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "mymove/capture.hpp"
#include "mymove/codec.hpp"
#include "mymove/errors.hpp"
#include "mymove/io.hpp"

namespace mymove {

namespace {

using std::chrono::minutes;
using std::chrono::seconds;

constexpr minutes kDay{1440};

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

struct Occurrence {
  Instant start;
  Instant end;
  const ScriptedActivity* activity;
};

Locomotion locomotion_for(GtClass c, double spm) {
  switch (c) {
    case GtClass::stepping: return spm >= 140 ? Locomotion::running : Locomotion::walking;
    case GtClass::biking: return Locomotion::on_bicycle;
    case GtClass::in_vehicle: return Locomotion::in_vehicle;
    default: return Locomotion::still;
  }
}

// Amplitude (m/s^2) and dominant frequency (Hz) of the synthetic waveform.
std::pair<double, double> waveform(GtClass c, double spm) {
  switch (c) {
    case GtClass::sitting: return {0.05, 0.3};
    case GtClass::lying: return {0.02, 0.2};
    case GtClass::standing: return {0.12, 0.4};
    case GtClass::stepping: return {2.0, std::max(0.5, spm / 60.0)};
    case GtClass::in_vehicle: return {0.4, 2.5};
    case GtClass::biking: return {1.2, 1.3};
  }
  return {0.05, 0.3};
}

InertialWindow synth_window(Instant anchor, GtClass c, double spm, std::mt19937_64& rng) {
  const SensorLayout layout;
  auto [amp, freq] = waveform(c, spm);
  std::normal_distribution<float> noise(0.0f, 0.05f);
  std::uniform_real_distribution<double> phase_d(0.0, 2 * std::numbers::pi);
  const double phase = phase_d(rng);
  const std::size_t n = layout.samples_per_window;
  std::vector<KindSamples> kinds;
  for (SensorKind k : kSensorKinds) {
    KindSamples ks;
    ks.kind = k;
    ks.components = layout.components(k);
    ks.values.resize(n * ks.components);
    for (std::size_t i = 0; i < n; ++i) {
      double w = std::sin(2 * std::numbers::pi * freq * static_cast<double>(i) / 25.0 + phase);
      float* s = &ks.values[i * ks.components];
      switch (k) {
        case SensorKind::accelerometer:
          s[0] = static_cast<float>(0.5 * amp * w) + noise(rng);
          s[1] = static_cast<float>(0.3 * amp * w) + noise(rng);
          s[2] = static_cast<float>(9.81 + amp * w) + noise(rng);
          break;
        case SensorKind::rotation_vector:
          s[0] = static_cast<float>(0.02 * amp * w);
          s[1] = static_cast<float>(0.01 * amp * w);
          s[2] = 0.0f;
          s[3] = 1.0f;
          break;
        case SensorKind::magnetometer:
          s[0] = 20.0f + noise(rng);
          s[1] = -5.0f + noise(rng);
          s[2] = 40.0f + noise(rng);
          break;
        case SensorKind::gravity:
          s[0] = static_cast<float>(0.2 * amp * w);
          s[1] = 0.0f;
          s[2] = 9.81f;
          break;
      }
    }
    kinds.push_back(std::move(ks));
  }
  return seal_minute_window(anchor, std::move(kinds), layout);
}

// Splits `total` over `n` minutes with Poisson-shaped variation; the parts
// always sum to `total`.
std::vector<std::uint32_t> allocate_steps(std::uint32_t total, std::size_t n, double rate, std::mt19937_64& rng) {
  std::vector<std::uint32_t> out(n, 0);
  if (n == 0 || total == 0) return out;
  std::poisson_distribution<int> pois(std::max(rate, 1.0));
  std::vector<double> w(n);
  double sum = 0;
  for (auto& x : w) sum += (x = pois(rng) + 1e-9);
  std::uint32_t assigned = 0;
  std::vector<std::pair<double, std::size_t>> rem;
  for (std::size_t i = 0; i < n; ++i) {
    double share = total * w[i] / sum;
    out[i] = static_cast<std::uint32_t>(std::floor(share));
    assigned += out[i];
    rem.push_back({share - out[i], i});
  }
  std::stable_sort(rem.begin(), rem.end(), [](auto& a, auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) out[rem[k % n].second]++;
  return out;
}

int word_count(std::string_view s) {
  int n = 0;
  bool in = false;
  for (char c : s) {
    bool sp = std::isspace(static_cast<unsigned char>(c));
    if (!sp && !in) ++n;
    in = !sp;
  }
  return n;
}

Millis audio_for(std::string_view text) {
  double s = std::min(110.0, 2.0 + 0.4 * word_count(text));
  return Millis{static_cast<long long>(std::llround(s * 1000.0))};
}

class ParticipantSim {
 public:
  ParticipantSim(const BehaviorScript& script, const ParticipantScript& p, const SimConfig& cfg)
      : script_(script), p_(p), cfg_(cfg) {
    const std::uint64_t pseed = splitmix64(cfg.seed ^ fnv1a(p.id));
    behavior_rng_.seed(pseed);
    sensor_rng_.seed(splitmix64(pseed ^ 0x5e15u));
    sched_seed_ = splitmix64(pseed ^ 0x5c4edu);
    t0_ = script.start_date - script.utc_offset;
    tend_ = t0_ + kDay * cfg.days;
    for (int d = 0; d < cfg.days; ++d) {
      Instant day = t0_ + kDay * d;
      for (const auto& w : p.wear) wear_.push_back({day + minutes{w.don_min}, day + minutes{w.doff_min}});
      for (const auto& a : p.timeline) occ_.push_back({day + minutes{a.start_min}, day + minutes{a.end_min}, &a});
    }
  }

  ParticipantTrace run() {
    trace_.participant_id = p_.id;
    trace_.device_id = p_.device_id;
    trace_.age = p_.age;
    build_minutes();
    build_ground_truth();
    collect_wear_minutes();
    run_events();
    if (cfg_.generate_sensors) build_batches();
    return std::move(trace_);
  }

 private:
  struct Capture {
    Instant submitted_at;
    const Occurrence* occ;
    ReportSession session;
    std::string transcript;
    bool ongoing;
    Instant span_end;
  };

  bool worn(Instant t) const {
    auto it = std::upper_bound(wear_.begin(), wear_.end(), t, [](Instant v, const Interval& w) { return v < w.end; });
    return it != wear_.end() && it->contains(t);
  }

  const Occurrence* occ_at(Instant t) const {
    auto it = std::upper_bound(occ_.begin(), occ_.end(), t, [](Instant v, const Occurrence& o) { return v < o.end; });
    return it != occ_.end() && it->start <= t ? &*it : nullptr;
  }

  std::size_t minute_index(Instant t) const {
    return static_cast<std::size_t>(std::chrono::duration_cast<minutes>(t - t0_).count());
  }

  void build_minutes() {
    const std::size_t n = minute_index(tend_);
    steps_.assign(n, 0);
    hr_target_.assign(n, static_cast<float>(p_.rest_hr));
    gt_of_minute_.assign(n, nullptr);
    for (const auto& o : occ_) {
      std::size_t a = minute_index(o.start), b = minute_index(o.end);
      auto total = static_cast<std::uint32_t>(std::llround(o.activity->steps_per_min * static_cast<double>(b - a)));
      auto parts = allocate_steps(total, b - a, o.activity->steps_per_min, sensor_rng_);
      for (std::size_t m = a; m < b; ++m) {
        steps_[m] = parts[m - a];
        hr_target_[m] = static_cast<float>(o.activity->hr_mean);
        gt_of_minute_[m] = o.activity;
      }
    }
  }

  void build_ground_truth() {
    auto& out = trace_.ground_truth;
    auto push = [&](Instant s, Instant e, GtClass c, std::uint32_t steps, bool mergeable) {
      if (e <= s) return;
      if (mergeable && !out.empty() && out.back().end == s && out.back().cls == c && merge_ok_) {
        out.back().end = e;
        out.back().steps += steps;
        return;
      }
      out.push_back({s, e, c, steps});
      merge_ok_ = mergeable;
    };
    // Filler between scripted activities: sitting while the watch is on,
    // lying otherwise.
    auto filler = [&](Instant s, Instant e) {
      Instant cur = s;
      while (cur < e) {
        bool on = worn(cur);
        Instant next = e;
        for (const auto& w : wear_) {
          if (w.start > cur && w.start < next) next = w.start;
          if (w.end > cur && w.end < next) next = w.end;
        }
        push(cur, next, on ? GtClass::sitting : GtClass::lying, 0, true);
        cur = next;
      }
    };
    Instant cursor = t0_;
    for (const auto& o : occ_) {
      filler(cursor, o.start);
      std::uint32_t steps = 0;
      for (std::size_t m = minute_index(o.start); m < minute_index(o.end); ++m) steps += steps_[m];
      push(o.start, o.end, o.activity->gt_class, steps, false);
      cursor = o.end;
    }
    filler(cursor, tend_);
  }

  WearContext context(Instant t) const {
    const Occurrence* o = occ_at(t);
    Locomotion l = o ? locomotion_for(o->activity->gt_class, o->activity->steps_per_min) : Locomotion::still;
    return {t, worn(t), l};
  }

  // Runs one capture session from the record press to auto-submit.
  Capture start_capture(Instant press, const Occurrence& o, ReportMethod method, std::optional<Instant> shown) {
    Capture c;
    c.occ = &o;
    c.ongoing = press + minutes{3} < o.end;
    ReportSession s;
    if (shown) s = transition(s, CaptureEvent::prompt_shown, *shown);
    s = transition(s, CaptureEvent::press_record, press);

    // Rendering may depend on the submission time, which depends on the
    // audio length; render twice from the same generator state.
    auto rng_copy = behavior_rng_;
    RenderContext ctx{o.start, o.end, press + seconds{30}, c.ongoing, script_.utc_offset};
    std::string text = render_transcript(*o.activity, ctx, behavior_rng_);
    Millis audio = audio_for(text);
    Instant end_press = press + audio;
    ctx.submitted_at = end_press + CaptureConfig{}.review_timeout;
    behavior_rng_ = rng_copy;
    text = render_transcript(*o.activity, ctx, behavior_rng_);

    s = transition(s, CaptureEvent::press_end, end_press);
    s = transition(s, CaptureEvent::tick, ctx.submitted_at);
    if (s.state != SessionState::submitted)
      throw Error(ErrorCode::kProtocol, fmt::format("capture at {} did not submit", format_iso(press)));
    s.method = method;
    c.session = s;
    c.submitted_at = *s.submitted_at;
    c.transcript = std::move(text);
    c.span_end = c.ongoing ? c.submitted_at : o.end;
    return c;
  }

  void finish_capture(const Capture& c, PromptScheduler& sched) {
    sched.submit(c.submitted_at, c.session.method);
    auto report = make_report(c.session, fmt::format("{}-{:05}", p_.device_id, ++report_seq_), p_.device_id);
    report->participant_id = p_.id;
    report->transcript = c.transcript;
    const auto& a = *c.occ->activity;
    LedgerEntry e;
    e.report_id = report->report_id;
    e.device_id = p_.device_id;
    e.participant_id = p_.id;
    e.method = report->method;
    e.submitted_at = report->submitted_at;
    e.activity_type = a.activity_type;
    e.cue = a.cue;
    e.effort = a.effort;
    e.scripted = {c.occ->start, c.occ->end};
    e.ongoing = c.ongoing;
    if (a.cue == Completeness::complete) e.expected_span = Interval{c.occ->start, c.span_end};
    trace_.reports.push_back(std::move(*report));
    trace_.ledger.push_back(std::move(e));
  }

  void run_events() {
    PromptScheduler sched(p_.device_id, t0_, sched_seed_, cfg_.scheduler);
    struct Voluntary {
      Instant at;
      const Occurrence* occ;
    };
    std::vector<Voluntary> vol;
    for (const auto& o : occ_) {
      const auto& a = *o.activity;
      if (a.report_policy != ReportPolicy::voluntary_at) continue;
      Instant day = floor_day(o.start + script_.utc_offset) - script_.utc_offset;
      Instant at = day + minutes{a.report_at_min.value_or(a.end_min + 2)};
      if (at < tend_) vol.push_back({at, &o});
    }
    std::stable_sort(vol.begin(), vol.end(), [](auto& x, auto& y) { return x.at < y.at; });
    std::size_t vi = 0;

    std::optional<Capture> capture;
    struct Response {
      Instant at;
      Instant delivered;
      const Occurrence* occ;
    };
    std::optional<Response> response;

    Instant next_minute = t0_;
    for (;;) {
      Instant t = tend_;
      auto take = [&](Instant c) { t = std::min(t, c); };
      take(next_minute);
      if (auto d = sched.next_deadline(); d && *d > last_t_) take(*d);
      if (vi < vol.size()) take(vol[vi].at);
      if (response) take(response->at);
      if (capture) take(capture->submitted_at);
      if (t >= tend_) break;
      last_t_ = t;

      for (const auto& ev : sched.tick(t, context(t))) {
        if (ev.kind != EventKind::deliver || capture || response) continue;
        const Occurrence* o = occ_at(ev.at);
        if (o && o->activity->report_policy == ReportPolicy::respond_to_prompt)
          response = Response{ev.at + cfg_.response_latency, ev.at, o};
      }
      if (capture && capture->submitted_at == t) {
        finish_capture(*capture, sched);
        capture.reset();
      }
      if (response && response->at == t) {
        if (!capture && worn(t))
          capture = start_capture(t, *response->occ, ReportMethod::prompted, response->delivered);
        response.reset();
      }
      if (vi < vol.size() && vol[vi].at == t) {
        if (capture) {
          vol[vi].at = capture->submitted_at + seconds{5};
          std::stable_sort(vol.begin() + static_cast<std::ptrdiff_t>(vi), vol.end(),
                           [](auto& x, auto& y) { return x.at < y.at; });
        } else {
          capture = start_capture(t, *vol[vi].occ, ReportMethod::voluntary, std::nullopt);
          ++vi;
        }
      }
      if (t == next_minute) next_minute += minutes{1};
    }
    trace_.scheduler_events = sched.log();
  }

  void build_batches() {
    std::normal_distribution<double> hr_noise(0.0, 3.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SensorBatch batch;
    std::uint64_t seq = 0;
    std::size_t worn_count = 0;
    auto flush = [&] {
      if (batch.vitals.empty() && batch.windows.empty()) return;
      batch.device_id = p_.device_id;
      batch.sequence = seq++;
      trace_.batches.push_back(std::move(batch));
      batch = SensorBatch{};
    };
    for (std::size_t m = 0; m < steps_.size(); ++m) {
      Instant anchor = t0_ + minutes{static_cast<long>(m)};
      if (m % 60 == 0) flush();
      if (!worn(anchor)) continue;
      const ScriptedActivity* a = gt_of_minute_[m];
      GtClass cls = a ? a->gt_class : GtClass::sitting;
      double spm = a ? a->steps_per_min : 0.0;
      MinuteVitals v{anchor, steps_[m], std::nullopt};
      double hr = hr_target_[m] + hr_noise(sensor_rng_);
      if (u(sensor_rng_) >= 0.02) v.heart_rate = static_cast<float>(std::max(30.0, hr));
      batch.vitals.push_back(v);
      batch.locomotion.push_back({anchor + seconds{30}, locomotion_for(cls, spm)});
      if (cfg_.inertial_stride > 0 && worn_count % static_cast<std::size_t>(cfg_.inertial_stride) == 0)
        batch.windows.push_back(synth_window(anchor, cls, spm, sensor_rng_));
      ++worn_count;
    }
    flush();
  }

  void collect_wear_minutes() {
    for (const auto& w : wear_)
      for (Instant m = w.start; m < w.end && m < tend_; m += minutes{1}) trace_.wear_minutes.push_back(m);
  }

  const BehaviorScript& script_;
  const ParticipantScript& p_;
  const SimConfig& cfg_;
  std::mt19937_64 behavior_rng_;
  std::mt19937_64 sensor_rng_;
  std::uint64_t sched_seed_ = 0;
  Instant t0_{};
  Instant tend_{};
  Instant last_t_{};
  std::vector<Interval> wear_;
  std::vector<Occurrence> occ_;
  std::vector<std::uint32_t> steps_;
  std::vector<float> hr_target_;
  std::vector<const ScriptedActivity*> gt_of_minute_;
  ParticipantTrace trace_;
  int report_seq_ = 0;
  bool merge_ok_ = false;
};

}  // namespace

std::vector<VerbalReport> SimTrace::all_reports() const {
  std::vector<VerbalReport> out;
  for (const auto& p : participants) out.insert(out.end(), p.reports.begin(), p.reports.end());
  return out;
}

std::vector<LedgerEntry> SimTrace::all_ledger() const {
  std::vector<LedgerEntry> out;
  for (const auto& p : participants) out.insert(out.end(), p.ledger.begin(), p.ledger.end());
  return out;
}

ParticipantTrace simulate_participant(const BehaviorScript& script, std::size_t index, const SimConfig& cfg) {
  if (index >= script.participants.size())
    throw Error(ErrorCode::kInvalidArgument, fmt::format("participant index {} out of range", index));
  return ParticipantSim(script, script.participants[index], cfg).run();
}

void check_sim_config(const BehaviorScript& script, const SimConfig& cfg) {
  validate_script(script);
  if (cfg.days <= 0) throw Error(ErrorCode::kInvalidArgument, "days must be positive");
  if (cfg.inertial_stride < 0) throw Error(ErrorCode::kInvalidArgument, "inertial stride must be >= 0");
  // A prompted answer must land before the prompt expires: latency, the
  // longest rendered recording, and the review timeout.
  if (cfg.response_latency < Millis{0} ||
      cfg.response_latency + seconds{110} + CaptureConfig{}.review_timeout > cfg.scheduler.expiry)
    throw Error(ErrorCode::kInvalidArgument, "response latency leaves no time to answer before expiry");
}

SimTrace run(const BehaviorScript& script, const SimConfig& cfg) {
  check_sim_config(script, cfg);
  SimTrace t;
  t.script_name = script.name;
  t.seed = cfg.seed;
  t.days = cfg.days;
  t.utc_offset = script.utc_offset;
  for (std::size_t i = 0; i < script.participants.size(); ++i)
    t.participants.push_back(ParticipantSim(script, script.participants[i], cfg).run());
  return t;
}

Json expected_summary(const SimTrace& trace) {
  auto counts = [](int p, int v) { return Json{{"prompted", p}, {"voluntary", v}, {"total", p + v}}; };
  auto date_of = [&](Instant t) { return format_date(t + trace.utc_offset); };

  std::vector<std::string> ids;
  for (const auto& p : trace.participants) ids.push_back(p.participant_id);
  std::sort(ids.begin(), ids.end());

  std::map<std::string, std::array<int, 2>> per_pid;
  std::map<std::string, std::map<std::string, std::array<int, 2>>> per_day;
  std::map<std::string, std::map<std::string, std::map<std::string, int>>> cues;
  std::map<std::string, int> efforts, semantics, types;
  std::array<int, 2> total{}, with{}, without{};
  int reports = 0;
  for (const auto& e : trace.all_ledger()) {
    int m = e.method == ReportMethod::prompted ? 0 : 1;
    per_pid[e.participant_id][m]++;
    per_day[e.participant_id][date_of(e.submitted_at)][m]++;
    total[m]++;
    ++reports;
    cues[std::string(to_string(e.method))]["singleton"][std::string(to_string(e.cue))]++;
    if (e.effort) {
      with[m]++;
      efforts[std::string(to_string(*e.effort))]++;
    } else {
      without[m]++;
    }
    types[std::string(to_string(e.activity_type))]++;
    semantics[std::string(to_string(semantic_of(e.activity_type)))]++;
  }

  Json j;
  j["participants"] = ids;
  Json rp = Json::object();
  for (const auto& id : ids) rp[id] = counts(per_pid[id][0], per_pid[id][1]);
  j["reports"] = rp;
  j["reports_total"] = counts(total[0], total[1]);
  Json pd = Json::object();
  for (const auto& [pid, days] : per_day)
    for (const auto& [d, c] : days) pd[pid][d] = counts(c[0], c[1]);
  j["reports_per_day"] = pd;
  j["structures"] = reports ? Json{{"singleton", reports}} : Json::object();
  j["time_cues"] = cues;
  j["effort"] = Json{{"with", counts(with[0], with[1])}, {"without", counts(without[0], without[1])}};
  j["effort_categories"] = efforts;
  j["semantics"] = semantics;
  j["activity_types"] = types;
  Json wear = Json::object();
  for (const auto& p : trace.participants) {
    std::map<std::string, int> mins;
    for (auto m : p.wear_minutes) mins[date_of(m)]++;
    for (const auto& [d, n] : mins) wear[p.participant_id][d] = std::round(n / 60.0 * 1000.0) / 1000.0;
  }
  j["wear_hours"] = wear;
  return j;
}

Json to_json(const LedgerEntry& e) {
  Json j{{"report_id", e.report_id},
         {"device_id", e.device_id},
         {"participant_id", e.participant_id},
         {"method", to_string(e.method)},
         {"submitted_at", format_iso(e.submitted_at)},
         {"activity_type", to_string(e.activity_type)},
         {"semantic", to_string(semantic_of(e.activity_type))},
         {"time_cue", to_string(e.cue)},
         {"effort", e.effort ? Json(to_string(*e.effort)) : Json(nullptr)},
         {"scripted", {{"start", format_iso(e.scripted.start)}, {"end", format_iso(e.scripted.end)}}},
         {"ongoing", e.ongoing}};
  j["expected_span"] = e.expected_span ? Json{{"start", format_iso(e.expected_span->start)},
                                              {"end", format_iso(e.expected_span->end)}}
                                       : Json(nullptr);
  return j;
}

void write_trace(const SimTrace& trace, const std::string& dir) {
  namespace fs = std::filesystem;
  std::string reports, events;
  Json ledger;
  ledger["script"] = trace.script_name;
  ledger["seed"] = trace.seed;
  ledger["days"] = trace.days;
  ledger["utc_offset_minutes"] = trace.utc_offset.count();
  ledger["participants"] = Json::array();
  ledger["entries"] = Json::array();
  for (const auto& p : trace.participants) {
    ledger["participants"].push_back(Json{{"id", p.participant_id}, {"device", p.device_id}, {"age", p.age}});
    for (const auto& b : p.batches)
      write_file_atomic((fs::path(dir) / "batches" / b.device_id / fmt::format("{}.mymv", b.sequence)).string(),
                        encode_batch(b));
    for (const auto& r : p.reports) reports += to_json(r).dump() + "\n";
    for (const auto& e : p.scheduler_events) events += to_jsonl(e) + "\n";
    for (const auto& e : p.ledger) ledger["entries"].push_back(to_json(e));
    write_file_atomic((fs::path(dir) / "ground_truth" / (p.participant_id + ".csv")).string(),
                      ground_truth_csv(p.ground_truth));
  }
  ledger["expected_summary"] = expected_summary(trace);
  write_file_atomic((fs::path(dir) / "reports.jsonl").string(), reports);
  write_file_atomic((fs::path(dir) / "scheduler.jsonl").string(), events);
  write_file_atomic((fs::path(dir) / "ledger.json").string(), ledger.dump(2) + "\n");
}

}  // namespace mymove

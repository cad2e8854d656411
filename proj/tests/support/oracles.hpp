#pragma once

// Independent reference implementations used to check the library. None of
// these call the code they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "mymove/analytics.hpp"
#include "mymove/scheduler.hpp"
#include "mymove/sensor.hpp"
#include "mymove/sim.hpp"

namespace oracle {

// ---- edit distance ---------------------------------------------------------

/// Top-down recursion over (i, j) suffixes with a memo table.
inline std::size_t edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  auto rec = [&](auto&& self, std::size_t i, std::size_t j) -> std::size_t {
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::size_t best = self(self, i + 1, j + 1) + (a[i] == b[j] ? 0 : 1);
    best = std::min(best, self(self, i + 1, j) + 1);
    best = std::min(best, self(self, i, j + 1) + 1);
    return memo[key] = best;
  };
  return rec(rec, 0, 0);
}

// ---- alignment -------------------------------------------------------------

/// Steps through the interval one second at a time. Inputs must sit on whole
/// seconds.
inline mymove::Alignment align_per_second(const mymove::Interval& iv,
                                          const std::vector<mymove::GroundTruthSegment>& segs) {
  using namespace std::chrono;
  mymove::Alignment out;
  auto total = duration_cast<seconds>(iv.end - iv.start).count();
  std::array<long, mymove::kGtClassCount> counts{};
  long uncovered = 0;
  for (long s = 0; s < total; ++s) {
    mymove::Instant t = iv.start + seconds{s};
    bool hit = false;
    for (const auto& g : segs)
      if (t >= g.start && t < g.end) {
        counts[static_cast<int>(g.cls)]++;
        hit = true;
        break;
      }
    if (!hit) ++uncovered;
  }
  for (int c = 0; c < mymove::kGtClassCount; ++c) out.fraction[c] = static_cast<double>(counts[c]) / static_cast<double>(total);
  out.uncovered = static_cast<double>(uncovered) / static_cast<double>(total);
  return out;
}

// ---- least squares ---------------------------------------------------------

struct NormalFit {
  std::vector<double> coef;
  std::vector<double> se;
};

/// Solves (X'X) b = X'y by Gauss-Jordan elimination in long double and takes
/// standard errors from the diagonal of sigma^2 (X'X)^-1.
inline NormalFit normal_equations(const std::vector<std::vector<double>>& x, const std::vector<double>& y) {
  const std::size_t n = x.size(), p = x.front().size();
  std::vector<std::vector<long double>> a(p, std::vector<long double>(2 * p + 1, 0.0L));
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t r = 0; r < n; ++r) a[i][j] += static_cast<long double>(x[r][i]) * x[r][j];
    for (std::size_t r = 0; r < n; ++r) a[i][2 * p] += static_cast<long double>(x[r][i]) * y[r];
    a[i][p + i] = 1.0L;
  }
  for (std::size_t c = 0; c < p; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < p; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    long double d = a[c][c];
    for (auto& v : a[c]) v /= d;
    for (std::size_t r = 0; r < p; ++r) {
      if (r == c) continue;
      long double f = a[r][c];
      for (std::size_t k = 0; k < 2 * p + 1; ++k) a[r][k] -= f * a[c][k];
    }
  }
  NormalFit fit;
  for (std::size_t i = 0; i < p; ++i) fit.coef.push_back(static_cast<double>(a[i][2 * p]));
  long double rss = 0;
  for (std::size_t r = 0; r < n; ++r) {
    long double pred = 0;
    for (std::size_t i = 0; i < p; ++i) pred += static_cast<long double>(x[r][i]) * a[i][2 * p];
    rss += (y[r] - pred) * (y[r] - pred);
  }
  long double s2 = rss / static_cast<long double>(n - p);
  for (std::size_t i = 0; i < p; ++i) fit.se.push_back(static_cast<double>(std::sqrt(s2 * a[i][p + i])));
  return fit;
}

// ---- scheduler protocol ----------------------------------------------------

struct ProtocolReport {
  std::size_t deliveries = 0;
  std::size_t expiries = 0;
  std::size_t voluntary = 0;
  std::vector<std::string> violations;
};

inline bool in_vehicle_at(const std::vector<mymove::GroundTruthSegment>& gt, mymove::Instant t) {
  for (const auto& g : gt)
    if (t >= g.start && t < g.end) return g.cls == mymove::GtClass::in_vehicle;
  return false;
}

/// Checks one participant's scheduler log against its simulated context and
/// reports. Worn state comes from the wear minute set.
inline ProtocolReport check_protocol(const mymove::ParticipantTrace& p,
                                     const mymove::SchedulerConfig& cfg = {}) {
  using namespace mymove;
  using std::chrono::minutes;
  ProtocolReport r;
  std::set<Instant> worn(p.wear_minutes.begin(), p.wear_minutes.end());
  auto bad = [&](std::string what, Instant t) { r.violations.push_back(fmt::format("{} {} at {}", p.device_id, what, format_iso(t))); };

  std::vector<Instant> deliveries;
  std::vector<std::pair<Instant, Instant>> expiries;  // (at, window start)
  std::vector<Instant> reschedules;
  Instant prev_at{};
  bool first = true;
  for (const auto& le : p.scheduler_events) {
    const auto& e = le.event;
    if (!first && e.at < prev_at) bad("events out of order", e.at);
    first = false;
    prev_at = e.at;
    if (e.kind == EventKind::deliver) deliveries.push_back(e.at);
    if (e.kind == EventKind::expire) expiries.push_back({e.at, e.plan.window_start});
    if (e.kind == EventKind::reschedule) reschedules.push_back(e.at);
  }
  r.deliveries = deliveries.size();
  r.expiries = expiries.size();

  std::set<std::int64_t> blocks;
  for (std::size_t i = 0; i < deliveries.size(); ++i) {
    Instant t = deliveries[i];
    if (i > 0 && t - deliveries[i - 1] < minutes{30}) bad("deliveries closer than 30 min", t);
    auto block = std::chrono::floor<std::chrono::hours>(t).time_since_epoch().count();
    if (!blocks.insert(block).second) bad("second delivery in one hour block", t);
    if (!worn.count(std::chrono::floor<minutes>(t))) bad("delivery while off-body", t);
    if (in_vehicle_at(p.ground_truth, t)) bad("delivery while in vehicle", t);

    // Consumed by a prompted report inside the window, or expired exactly at +15 min.
    bool consumed = false;
    for (const auto& rep : p.reports)
      if (rep.method == ReportMethod::prompted && rep.submitted_at >= t && rep.submitted_at < t + cfg.expiry)
        consumed = true;
    bool exact = false;
    for (const auto& [at, ws] : expiries)
      if (at == t + cfg.expiry) exact = true;
    if (consumed && exact) bad("consumed prompt also expired", t);
    if (!consumed && !exact) bad("unconsumed prompt without an expiry at exactly +15 min", t);
  }
  for (const auto& [at, ws] : expiries) {
    bool ok = false;
    for (Instant d : deliveries)
      if (at == d + cfg.expiry) ok = true;
    if (!ok) bad("expiry not 15 min after a delivery", at);
  }

  for (const auto& rep : p.reports) {
    if (rep.method != ReportMethod::voluntary) continue;
    ++r.voluntary;
    Instant s = rep.submitted_at;
    if (std::find(reschedules.begin(), reschedules.end(), s) == reschedules.end())
      bad("voluntary submission without a fresh reservation", s);
    for (Instant d : deliveries)
      if (d > s && d < s + cfg.buffer) bad("delivery within the buffer after a voluntary submission", d);
  }
  return r;
}

// ---- random batches --------------------------------------------------------

inline mymove::SensorBatch random_batch(std::mt19937_64& rng, const std::string& device, std::uint64_t seq) {
  using namespace mymove;
  std::uniform_int_distribution<int> small(0, 3);
  std::uniform_real_distribution<float> val(-20.0f, 20.0f);
  SensorBatch b;
  b.device_id = device;
  b.sequence = seq;
  Instant base = from_epoch_ms(1'620'000'000'000LL + static_cast<std::int64_t>(seq) * 3'600'000LL);
  SensorLayout layout;
  int windows = small(rng) % 2;
  for (int w = 0; w < windows; ++w) {
    std::vector<KindSamples> ks;
    for (auto k : kSensorKinds) {
      KindSamples s{k, layout.components(k), {}};
      s.values.resize(static_cast<std::size_t>(layout.samples_per_window) * s.components);
      for (auto& v : s.values) v = val(rng);
      ks.push_back(std::move(s));
    }
    b.windows.push_back(seal_minute_window(base + std::chrono::minutes{w}, std::move(ks)));
  }
  int vitals = small(rng) * 5;
  for (int m = 0; m < vitals; ++m) {
    MinuteVitals v{base + std::chrono::minutes{m}, static_cast<std::uint32_t>(rng() % 200), std::nullopt};
    if (rng() % 4) v.heart_rate = 50.0f + static_cast<float>(rng() % 100);
    b.vitals.push_back(v);
  }
  int loco = small(rng) * 3;
  for (int m = 0; m < loco; ++m)
    b.locomotion.push_back({base + std::chrono::seconds{30 + 60 * m}, static_cast<Locomotion>(rng() % 6)});
  return b;
}

}  // namespace oracle

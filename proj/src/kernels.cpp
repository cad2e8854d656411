#include "mymove/kernels.hpp"

#include <exception>
#include <optional>

#include <fmt/format.h>

#include "mymove/errors.hpp"

namespace mymove {

namespace {

// Runs body(i) for i in [0, n). Exceptions cannot leave an OpenMP region, so
// the one from the lowest index is kept and rethrown, matching the serial loop.
template <class F>
void for_each_index(std::size_t n, Exec exec, F body) {
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

std::vector<std::vector<ExtractedActivity>> extract_all(const Lexicon& lex, std::span<const Transcript> transcripts,
                                                       const ExtractorConfig& cfg, Exec exec) {
  std::vector<std::vector<ExtractedActivity>> out(transcripts.size());
  for_each_index(transcripts.size(), exec, [&](std::size_t i) { out[i] = extract_report(lex, transcripts[i], cfg); });
  return out;
}

WerBatch wer_all(std::span<const WerPair> pairs, Exec exec) {
  std::vector<std::size_t> errors(pairs.size()), tokens(pairs.size());
  for_each_index(pairs.size(), exec, [&](std::size_t i) {
    auto r = normalize_text(pairs[i].reference);
    if (r.empty()) throw Error(ErrorCode::kEmptyReference, fmt::format("reference {} is empty", i));
    auto h = normalize_text(pairs[i].hypothesis);
    errors[i] = edit_distance(r, h);
    tokens[i] = r.size();
  });
  WerBatch b;
  b.rates.resize(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    b.rates[i] = static_cast<double>(errors[i]) / static_cast<double>(tokens[i]);
    b.totals.errors += errors[i];
    b.totals.reference_tokens += tokens[i];
  }
  return b;
}

std::vector<Alignment> align_all(std::span<const Interval> intervals, std::span<const GroundTruthSegment> segments,
                                 Exec exec) {
  std::vector<Alignment> out(intervals.size());
  for_each_index(intervals.size(), exec, [&](std::size_t i) { out[i] = align(intervals[i], segments); });
  return out;
}

SimTrace simulate_all(const BehaviorScript& script, const SimConfig& cfg, Exec exec) {
  check_sim_config(script, cfg);
  SimTrace t;
  t.script_name = script.name;
  t.seed = cfg.seed;
  t.days = cfg.days;
  t.utc_offset = script.utc_offset;
  t.participants.resize(script.participants.size());
  for_each_index(script.participants.size(), exec,
                 [&](std::size_t i) { t.participants[i] = simulate_participant(script, i, cfg); });
  return t;
}

}  // namespace mymove

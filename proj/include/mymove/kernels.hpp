#pragma once

#include <span>
#include <string>
#include <vector>

#include "mymove/analytics.hpp"
#include "mymove/extractor.hpp"
#include "mymove/lexicon.hpp"
#include "mymove/sim.hpp"

namespace mymove {

/// Batch kernels. `serial` is the reference; `parallel` uses OpenMP and must
/// produce identical output.
enum class Exec { serial, parallel };

std::vector<std::vector<ExtractedActivity>> extract_all(const Lexicon& lex, std::span<const Transcript> transcripts,
                                                       const ExtractorConfig& cfg = {}, Exec exec = Exec::parallel);

struct WerPair {
  std::string reference;
  std::string hypothesis;
};

/// Per-pair rates plus pooled totals.
struct WerBatch {
  std::vector<double> rates;
  WerTotals totals;
};

WerBatch wer_all(std::span<const WerPair> pairs, Exec exec = Exec::parallel);

/// Aligns every interval against one sorted ground-truth timeline.
std::vector<Alignment> align_all(std::span<const Interval> intervals, std::span<const GroundTruthSegment> segments,
                                 Exec exec = Exec::parallel);

/// Same output as run(); participants are simulated concurrently.
SimTrace simulate_all(const BehaviorScript& script, const SimConfig& cfg, Exec exec = Exec::parallel);

}  // namespace mymove

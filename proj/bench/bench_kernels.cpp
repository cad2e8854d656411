#include <benchmark/benchmark.h>

#include "mymove/kernels.hpp"

using namespace mymove;

namespace {

const SimTrace& trace() {
  static const SimTrace t = [] {
    SimConfig cfg;
    cfg.days = 7;
    cfg.inertial_stride = 0;
    return run(load_script("default"), cfg);
  }();
  return t;
}

std::vector<Transcript> transcripts() {
  std::vector<Transcript> out;
  for (const auto& r : trace().all_reports())
    out.push_back({r.report_id, r.device_id, r.participant_id, r.method, r.submitted_at, r.transcript});
  return out;
}

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::parallel : Exec::serial; }

void BM_Extract(benchmark::State& state) {
  auto lex = Lexicon::bundled();
  auto ts = transcripts();
  for (auto _ : state) benchmark::DoNotOptimize(extract_all(lex, ts, {}, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(ts.size()));
}

void BM_Wer(benchmark::State& state) {
  std::vector<WerPair> pairs;
  auto ts = transcripts();
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) pairs.push_back({ts[i].text, ts[i + 1].text});
  for (auto _ : state) benchmark::DoNotOptimize(wer_all(pairs, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(pairs.size()));
}

void BM_Align(benchmark::State& state) {
  const auto& gt = trace().participants.front().ground_truth;
  std::vector<Interval> ivs;
  for (const auto& e : trace().all_ledger()) ivs.push_back(e.scripted);
  for (auto _ : state) benchmark::DoNotOptimize(align_all(ivs, gt, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(ivs.size()));
}

void BM_Simulate(benchmark::State& state) {
  auto script = load_script("default");
  SimConfig cfg;
  cfg.days = 7;
  cfg.inertial_stride = 10;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_all(script, cfg, exec_of(state)));
}

}  // namespace

BENCHMARK(BM_Extract)->Arg(0)->Arg(1);
BENCHMARK(BM_Wer)->Arg(0)->Arg(1);
BENCHMARK(BM_Align)->Arg(0)->Arg(1);
BENCHMARK(BM_Simulate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

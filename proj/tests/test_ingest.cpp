#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <random>
#include <set>
#include <thread>

#include "mymove/codec.hpp"
#include "mymove/errors.hpp"
#include "mymove/ingest.hpp"
#include "mymove/io.hpp"
#include "support/oracles.hpp"
#include "support/tmpdir.hpp"

using namespace mymove;

namespace {

SensorBatch empty_batch(const std::string& device, std::uint64_t seq) {
  SensorBatch b;
  b.device_id = device;
  b.sequence = seq;
  return b;
}

struct CountingSink : BatchSink {
  std::atomic<int> writes{0};
  bool fail = false;
  void persist(const SensorBatch&, std::span<const std::uint8_t>) override {
    if (fail) throw Error(ErrorCode::kStorage, "disk full");
    ++writes;
  }
};

// Missing sequences between min and max of `seen`, grouped into runs.
std::vector<GapRange> gaps_by_set_difference(const std::set<std::uint64_t>& seen) {
  std::vector<GapRange> out;
  if (seen.empty()) return out;
  std::optional<GapRange> run;
  for (std::uint64_t s = *seen.begin(); s <= *seen.rbegin(); ++s) {
    if (seen.count(s)) {
      if (run) out.push_back(*run);
      run.reset();
    } else if (run) {
      run->last = s;
    } else {
      run = GapRange{s, s};
    }
  }
  return out;
}

}  // namespace

TEST_CASE("duplicates are acknowledged and not stored twice") {
  auto sink = std::make_shared<CountingSink>();
  BatchStore store(sink);
  auto b = empty_batch("W01", 3);
  auto first = store.ingest(b);
  CHECK(first.accepted);
  CHECK_FALSE(first.duplicate);
  for (int i = 0; i < 2; ++i) {
    auto again = store.ingest(b);
    CHECK_FALSE(again.accepted);
    CHECK(again.duplicate);
  }
  CHECK(store.stored_count() == 1);
  CHECK(sink->writes == 1);
}

TEST_CASE("new gaps are reported on both sides") {
  BatchStore store;
  CHECK(store.ingest(empty_batch("W01", 5)).new_gaps.empty());
  auto ack = store.ingest(empty_batch("W01", 9));
  REQUIRE(ack.new_gaps.size() == 1);
  CHECK(ack.new_gaps[0] == GapRange{6, 8});
  ack = store.ingest(empty_batch("W01", 2));
  REQUIRE(ack.new_gaps.size() == 1);
  CHECK(ack.new_gaps[0] == GapRange{3, 4});
  CHECK(store.ingest(empty_batch("W01", 6)).new_gaps.empty());
  CHECK(store.gaps("W01") == std::vector<GapRange>{{3, 4}, {7, 8}});
  CHECK(store.gaps("W02").empty());
  CHECK(store.contains("W01", 9));
  CHECK_FALSE(store.contains("W01", 7));
}

TEST_CASE("gaps match the set difference for random arrival orders") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    BatchStore store;
    std::set<std::uint64_t> seen;
    int n = 1 + static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) {
      std::uint64_t seq = rng() % 60;
      store.ingest(empty_batch("D", seq));
      seen.insert(seq);
    }
    REQUIRE(store.gaps("D") == gaps_by_set_difference(seen));
    REQUIRE(store.stored_count() == seen.size());
  }
}

TEST_CASE("sink failure leaves the store unchanged") {
  auto sink = std::make_shared<CountingSink>();
  sink->fail = true;
  BatchStore store(sink);
  try {
    store.ingest(empty_batch("W01", 1));
    FAIL("no StorageError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kStorage);
  }
  CHECK(store.stored_count() == 0);
  sink->fail = false;
  CHECK(store.ingest(empty_batch("W01", 1)).accepted);
}

TEST_CASE("concurrent replays store one copy per sequence") {
  auto sink = std::make_shared<CountingSink>();
  BatchStore store(sink);
  std::atomic<int> accepted{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 6; ++t)
    threads.emplace_back([&, t] {
      for (std::uint64_t s = 0; s < 100; ++s)
        if (store.ingest(empty_batch(t % 2 ? "A" : "B", s)).accepted) ++accepted;
    });
  for (auto& th : threads) th.join();
  CHECK(accepted == 200);
  CHECK(sink->writes == 200);
  CHECK(store.stored_count() == 200);
  CHECK(store.gaps("A").empty());
}

TEST_CASE("directory sink writes files that decode back") {
  testing_support::TempDir dir("ingest");
  BatchStore store(std::make_shared<DirectoryBatchSink>(dir.str()));
  std::mt19937_64 rng(9);
  auto b = oracle::random_batch(rng, "W02", 17);
  auto bytes = encode_batch(b);
  for (int i = 0; i < 3; ++i) store.ingest(b, bytes);
  auto path = dir / "W02/17.mymv";
  REQUIRE(std::filesystem::exists(path));
  CHECK(read_file_bytes(path) == bytes);
  int files = 0;
  for (auto& e : std::filesystem::recursive_directory_iterator(dir.path()))
    if (e.is_regular_file()) ++files;
  CHECK(files == 1);

  BatchStore restored;
  restored.restore(decode_batch(read_file_bytes(path)));
  CHECK(restored.contains("W02", 17));
  CHECK(restored.vitals("W02").size() == b.vitals.size());
}

TEST_CASE("vitals come back sorted across batches") {
  BatchStore store;
  auto t0 = parse_iso("2021-05-10T10:00:00Z");
  auto later = empty_batch("W01", 2);
  later.vitals.push_back({t0 + std::chrono::minutes{5}, 10, 90.0f});
  auto earlier = empty_batch("W01", 1);
  earlier.vitals.push_back({t0, 3, std::nullopt});
  store.ingest(later);
  store.ingest(earlier);
  auto v = store.vitals("W01");
  REQUIRE(v.size() == 2);
  CHECK(v[0].minute_anchor == t0);
  CHECK(v[1].step_count == 10);
}

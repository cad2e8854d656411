#include "mymove/ingest.hpp"

#include <algorithm>
#include <filesystem>

#include <fmt/format.h>

#include "mymove/codec.hpp"
#include "mymove/errors.hpp"
#include "mymove/io.hpp"

namespace mymove {

namespace fs = std::filesystem;

void DirectoryBatchSink::persist(const SensorBatch& batch, std::span<const std::uint8_t> bytes) {
  std::vector<std::uint8_t> owned;
  if (bytes.empty()) {
    owned = encode_batch(batch);
    bytes = owned;
  }
  write_file_atomic((fs::path(dir_) / batch.device_id / fmt::format("{}.mymv", batch.sequence)).string(), bytes);
}

StoredBatch BatchStore::summarize(const SensorBatch& b) {
  return {b.device_id, b.sequence, b.windows.size(), b.vitals, b.locomotion};
}

BatchStore::Stream& BatchStore::stream(const std::string& device) {
  {
    std::shared_lock lock(map_mu_);
    auto it = streams_.find(device);
    if (it != streams_.end()) return *it->second;
  }
  std::unique_lock lock(map_mu_);
  auto& slot = streams_[device];
  if (!slot) slot = std::make_unique<Stream>();
  return *slot;
}

const BatchStore::Stream* BatchStore::find(const std::string& device) const {
  std::shared_lock lock(map_mu_);
  auto it = streams_.find(device);
  return it == streams_.end() ? nullptr : it->second.get();
}

IngestAck BatchStore::ingest(const SensorBatch& batch, std::span<const std::uint8_t> bytes) {
  Stream& s = stream(batch.device_id);
  std::lock_guard lock(s.mu);
  IngestAck ack;
  if (s.batches.count(batch.sequence)) {
    ack.duplicate = true;
    return ack;
  }
  if (sink_) sink_->persist(batch, bytes);

  std::uint64_t seq = batch.sequence;
  if (!s.batches.empty()) {
    std::uint64_t lo = s.batches.begin()->first;
    std::uint64_t hi = s.batches.rbegin()->first;
    if (seq > hi + 1) ack.new_gaps.push_back({hi + 1, seq - 1});
    if (seq + 1 < lo) ack.new_gaps.push_back({seq + 1, lo - 1});
  }
  s.batches.emplace(seq, summarize(batch));
  ack.accepted = true;
  return ack;
}

void BatchStore::restore(const SensorBatch& batch) {
  Stream& s = stream(batch.device_id);
  std::lock_guard lock(s.mu);
  s.batches.emplace(batch.sequence, summarize(batch));
}

std::size_t BatchStore::stored_count() const {
  std::shared_lock lock(map_mu_);
  std::size_t n = 0;
  for (const auto& [_, s] : streams_) {
    std::lock_guard g(s->mu);
    n += s->batches.size();
  }
  return n;
}

bool BatchStore::contains(const std::string& device, std::uint64_t seq) const {
  const Stream* s = find(device);
  if (!s) return false;
  std::lock_guard lock(s->mu);
  return s->batches.count(seq) > 0;
}

std::vector<GapRange> BatchStore::gaps(const std::string& device) const {
  std::vector<GapRange> out;
  const Stream* s = find(device);
  if (!s) return out;
  std::lock_guard lock(s->mu);
  std::optional<std::uint64_t> prev;
  for (const auto& [seq, _] : s->batches) {
    if (prev && seq > *prev + 1) out.push_back({*prev + 1, seq - 1});
    prev = seq;
  }
  return out;
}

std::vector<std::string> BatchStore::devices() const {
  std::shared_lock lock(map_mu_);
  std::vector<std::string> out;
  for (const auto& [id, _] : streams_) out.push_back(id);
  return out;
}

std::vector<StoredBatch> BatchStore::batches(const std::string& device) const {
  std::vector<StoredBatch> out;
  const Stream* s = find(device);
  if (!s) return out;
  std::lock_guard lock(s->mu);
  for (const auto& [_, b] : s->batches) out.push_back(b);
  return out;
}

std::vector<MinuteVitals> BatchStore::vitals(const std::string& device) const {
  std::vector<MinuteVitals> out;
  for (const auto& b : batches(device)) out.insert(out.end(), b.vitals.begin(), b.vitals.end());
  std::sort(out.begin(), out.end(),
            [](const MinuteVitals& a, const MinuteVitals& b) { return a.minute_anchor < b.minute_anchor; });
  return out;
}

IngestAck ingest_batch(BatchStore& store, const SensorBatch& batch) { return store.ingest(batch); }

}  // namespace mymove

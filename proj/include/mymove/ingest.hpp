#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "mymove/sensor.hpp"

namespace mymove {

/// Inclusive run of missing sequence numbers.
struct GapRange {
  std::uint64_t first = 0;
  std::uint64_t last = 0;
  friend bool operator==(const GapRange&, const GapRange&) = default;
};

struct IngestAck {
  bool accepted = false;
  bool duplicate = false;
  std::vector<GapRange> new_gaps;
};

/// Durable storage behind a BatchStore. persist() must not return until the
/// batch is durable; throwing leaves the store unchanged.
class BatchSink {
 public:
  virtual ~BatchSink() = default;
  virtual void persist(const SensorBatch& batch, std::span<const std::uint8_t> bytes) = 0;
};

/// Writes <dir>/<device>/<sequence>.mymv via temp file, fsync and rename.
class DirectoryBatchSink : public BatchSink {
 public:
  explicit DirectoryBatchSink(std::string dir) : dir_(std::move(dir)) {}
  void persist(const SensorBatch& batch, std::span<const std::uint8_t> bytes) override;

 private:
  std::string dir_;
};

/// What the store keeps in memory per batch. Inertial windows stay on disk.
struct StoredBatch {
  std::string device_id;
  std::uint64_t sequence = 0;
  std::size_t window_count = 0;
  std::vector<MinuteVitals> vitals;
  std::vector<LocomotionSample> locomotion;
};

class BatchStore {
 public:
  explicit BatchStore(std::shared_ptr<BatchSink> sink = nullptr) : sink_(std::move(sink)) {}

  /// Idempotent by (device_id, sequence). Throws StorageError when the sink
  /// fails; no ack is produced in that case.
  IngestAck ingest(const SensorBatch& batch, std::span<const std::uint8_t> bytes = {});

  /// Loads an already persisted batch without writing it again.
  void restore(const SensorBatch& batch);

  std::size_t stored_count() const;
  bool contains(const std::string& device, std::uint64_t seq) const;
  /// Missing sequences between the lowest and highest seen for the device.
  std::vector<GapRange> gaps(const std::string& device) const;
  std::vector<std::string> devices() const;
  std::vector<StoredBatch> batches(const std::string& device) const;
  std::vector<MinuteVitals> vitals(const std::string& device) const;

 private:
  struct Stream {
    mutable std::mutex mu;
    std::map<std::uint64_t, StoredBatch> batches;
  };
  Stream& stream(const std::string& device);
  const Stream* find(const std::string& device) const;
  static StoredBatch summarize(const SensorBatch& b);

  std::shared_ptr<BatchSink> sink_;
  mutable std::shared_mutex map_mu_;
  std::map<std::string, std::unique_ptr<Stream>> streams_;
};

IngestAck ingest_batch(BatchStore& store, const SensorBatch& batch);

}  // namespace mymove

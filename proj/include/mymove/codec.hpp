#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mymove/sensor.hpp"

namespace mymove {

inline constexpr std::uint8_t kBatchVersion = 0x01;

/// Serializes a batch into the .mymv layout (see docs/format.md).
std::vector<std::uint8_t> encode_batch(const SensorBatch& batch);

/// Throws FormatError, TruncatedBatch or CorruptBatch.
SensorBatch decode_batch(std::span<const std::uint8_t> bytes);

}  // namespace mymove

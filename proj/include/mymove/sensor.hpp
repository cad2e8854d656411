#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mymove/time.hpp"
#include "mymove/types.hpp"

namespace mymove {

enum class SensorKind : std::uint8_t {
  accelerometer = 1,
  rotation_vector = 2,
  magnetometer = 3,
  gravity = 4,
};

inline constexpr std::array<SensorKind, 4> kSensorKinds = {
    SensorKind::accelerometer, SensorKind::rotation_vector, SensorKind::magnetometer,
    SensorKind::gravity};

std::string_view to_string(SensorKind k);

struct SensorLayout {
  std::uint16_t samples_per_window = 500;  // 20 s at 25 Hz
  std::uint8_t accelerometer = 3;
  std::uint8_t rotation_vector = 4;
  std::uint8_t magnetometer = 3;
  std::uint8_t gravity = 3;

  std::uint8_t components(SensorKind k) const;
};

struct KindSamples {
  SensorKind kind = SensorKind::accelerometer;
  std::uint8_t components = 3;
  std::vector<float> values;  // sample-major, components per sample

  std::size_t sample_count() const { return components ? values.size() / components : 0; }
  friend bool operator==(const KindSamples&, const KindSamples&) = default;
};

struct InertialWindow {
  Instant minute_anchor{};
  std::vector<KindSamples> kinds;
  friend bool operator==(const InertialWindow&, const InertialWindow&) = default;
};

struct MinuteVitals {
  Instant minute_anchor{};
  std::uint32_t step_count = 0;
  std::optional<float> heart_rate;
  friend bool operator==(const MinuteVitals&, const MinuteVitals&) = default;
};

struct LocomotionSample {
  Instant at{};
  Locomotion cls = Locomotion::still;
  friend bool operator==(const LocomotionSample&, const LocomotionSample&) = default;
};

struct SensorBatch {
  std::string device_id;
  std::uint64_t sequence = 0;
  std::vector<InertialWindow> windows;
  std::vector<MinuteVitals> vitals;
  std::vector<LocomotionSample> locomotion;
  friend bool operator==(const SensorBatch&, const SensorBatch&) = default;
};

/// Validates sample counts. All four kinds must be present; a missing kind or
/// too few samples is ShortWindow, too many is OverfullWindow.
InertialWindow seal_minute_window(Instant minute_anchor, std::vector<KindSamples> samples,
                                  const SensorLayout& layout = {});

}  // namespace mymove

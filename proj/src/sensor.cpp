#include "mymove/sensor.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "mymove/errors.hpp"

namespace mymove {

std::string_view to_string(SensorKind k) {
  switch (k) {
    case SensorKind::accelerometer: return "accelerometer";
    case SensorKind::rotation_vector: return "rotation_vector";
    case SensorKind::magnetometer: return "magnetometer";
    case SensorKind::gravity: return "gravity";
  }
  return "?";
}

std::uint8_t SensorLayout::components(SensorKind k) const {
  switch (k) {
    case SensorKind::accelerometer: return accelerometer;
    case SensorKind::rotation_vector: return rotation_vector;
    case SensorKind::magnetometer: return magnetometer;
    case SensorKind::gravity: return gravity;
  }
  return 0;
}

InertialWindow seal_minute_window(Instant minute_anchor, std::vector<KindSamples> samples,
                                  const SensorLayout& layout) {
  InertialWindow w;
  w.minute_anchor = minute_anchor;
  for (SensorKind kind : kSensorKinds) {
    auto it = std::find_if(samples.begin(), samples.end(),
                           [&](const KindSamples& s) { return s.kind == kind; });
    if (it == samples.end())
      throw Error(ErrorCode::kShortWindow, fmt::format("{} missing", to_string(kind)));
    std::size_t want = std::size_t{layout.samples_per_window} * layout.components(kind);
    if (it->components != layout.components(kind))
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("{} has {} components, expected {}", to_string(kind),
                              it->components, layout.components(kind)));
    if (it->values.size() < want)
      throw Error(ErrorCode::kShortWindow,
                  fmt::format("{} has {} samples", to_string(kind), it->sample_count()));
    if (it->values.size() > want)
      throw Error(ErrorCode::kOverfullWindow,
                  fmt::format("{} has {} samples", to_string(kind), it->sample_count()));
    w.kinds.push_back(std::move(*it));
  }
  return w;
}

}  // namespace mymove

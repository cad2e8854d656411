#include <algorithm>
#include <array>
#include <sstream>

#include <fmt/format.h>

#include "mymove/analytics.hpp"
#include "mymove/errors.hpp"

namespace mymove {

namespace {
constexpr std::array<std::string_view, kGtClassCount> kGtNames = {
    "sitting", "lying", "standing", "stepping", "in_vehicle", "biking"};

double overlap_ms(const Interval& a, Instant b0, Instant b1) {
  auto lo = std::max(a.start, b0);
  auto hi = std::min(a.end, b1);
  return hi > lo ? static_cast<double>((hi - lo).count()) : 0.0;
}

void require_positive(const Interval& iv) {
  if (iv.end <= iv.start)
    throw Error(ErrorCode::kDegenerateInterval,
                fmt::format("[{}, {}) has no length", format_iso(iv.start), format_iso(iv.end)));
}
}  // namespace

std::string_view to_string(GtClass c) { return kGtNames[static_cast<int>(c)]; }

std::optional<GtClass> gt_class_from_string(std::string_view s) {
  for (int i = 0; i < kGtClassCount; ++i)
    if (kGtNames[i] == s) return static_cast<GtClass>(i);
  return std::nullopt;
}

std::vector<GroundTruthSegment> parse_ground_truth_csv(std::string_view csv) {
  std::vector<GroundTruthSegment> out;
  std::istringstream in{std::string(csv)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("start_iso", 0) == 0) continue;
    std::vector<std::string> cols;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cols.push_back(cell);
    if (cols.size() != 4)
      throw Error(ErrorCode::kInvalidArgument, fmt::format("ground truth line {}: expected 4 columns", line_no));
    GroundTruthSegment s;
    s.start = parse_iso(cols[0]);
    s.end = parse_iso(cols[1]);
    auto cls = gt_class_from_string(cols[2]);
    if (!cls) throw Error(ErrorCode::kInvalidArgument, fmt::format("ground truth line {}: class '{}'", line_no, cols[2]));
    s.cls = *cls;
    s.steps = static_cast<std::uint32_t>(std::stoul(cols[3]));
    if (s.end <= s.start)
      throw Error(ErrorCode::kInvalidArgument, fmt::format("ground truth line {}: empty segment", line_no));
    if (!out.empty() && s.start < out.back().end)
      throw Error(ErrorCode::kInvalidArgument, fmt::format("ground truth line {}: overlaps previous", line_no));
    out.push_back(s);
  }
  return out;
}

std::string ground_truth_csv(std::span<const GroundTruthSegment> segments) {
  std::string out = "start_iso,end_iso,class,steps\n";
  for (const auto& s : segments)
    out += fmt::format("{},{},{},{}\n", format_iso(s.start), format_iso(s.end), to_string(s.cls), s.steps);
  return out;
}

Alignment align(const Interval& interval, std::span<const GroundTruthSegment> segments) {
  require_positive(interval);
  Alignment a;
  const double total = static_cast<double>(interval.length().count());
  auto first = std::lower_bound(segments.begin(), segments.end(), interval.start,
                                [](const GroundTruthSegment& s, Instant t) { return s.end <= t; });
  double covered = 0.0;
  for (auto it = first; it != segments.end() && it->start < interval.end; ++it) {
    double ov = overlap_ms(interval, it->start, it->end);
    a.fraction[static_cast<int>(it->cls)] += ov / total;
    covered += ov;
  }
  a.uncovered = (total - covered) / total;
  return a;
}

double cadence(std::span<const MinuteVitals> bins, const Interval& interval) {
  require_positive(interval);
  double steps = 0.0;
  for (const auto& b : bins) {
    Instant b1 = b.minute_anchor + std::chrono::minutes{1};
    double ov = overlap_ms(interval, b.minute_anchor, b1);
    if (ov > 0) steps += b.step_count * ov / 60000.0;
  }
  return steps / minutes_between(interval.start, interval.end);
}

double cadence(std::span<const GroundTruthSegment> segments, const Interval& interval) {
  require_positive(interval);
  double steps = 0.0;
  for (const auto& s : segments) {
    double ov = overlap_ms(interval, s.start, s.end);
    if (ov > 0) steps += s.steps * ov / static_cast<double>((s.end - s.start).count());
  }
  return steps / minutes_between(interval.start, interval.end);
}

}  // namespace mymove

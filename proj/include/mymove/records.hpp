#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "mymove/analytics.hpp"
#include "mymove/extractor.hpp"
#include "mymove/types.hpp"

namespace mymove {

using Json = nlohmann::ordered_json;

/// Field of an extracted activity a reviewer may override.
enum class LabelField { activity_type, semantic, time_cue, effort };

std::string_view to_string(LabelField f);
std::optional<LabelField> label_field_from_string(std::string_view s);

struct LabelCorrection {
  std::string activity_id;
  LabelField field = LabelField::activity_type;
  std::string old_value;
  std::string new_value;
  std::string author;
  Instant at{};
  std::string lexicon_pattern;  // optional; becomes an override row
  friend bool operator==(const LabelCorrection&, const LabelCorrection&) = default;
};

/// Throws InvalidArgument when new_value is not a member of the field's enum.
void validate_correction_value(LabelField field, std::string_view value);
/// Current value of the field as a string ("unknown"/"none" when absent).
std::string label_value(const ExtractedActivity& a, LabelField field);
/// Overwrites the field; semantic follows a corrected activity type.
void apply_correction(ExtractedActivity& a, const LabelCorrection& c);

Json to_json(const VerbalReport& r);
VerbalReport report_from_json(const Json& j);

Json to_json(const ClockTime& c);
Json to_json(const TimeCue& c);
TimeCue time_cue_from_json(const Json& j);

Json to_json(const ExtractedActivity& a);
ExtractedActivity activity_from_json(const Json& j);

Json to_json(const LabelCorrection& c);
LabelCorrection correction_from_json(const Json& j);

Json to_json(const GroundTruthSegment& s);

}  // namespace mymove

#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace mymove {

enum class Semantic {
  housekeeping,
  self_maintenance,
  non_exercise_stepping,
  screen_time,
  exercise,
  paperwork_desk_work,
  hobby_leisure,
  resting,
  social,
};

enum class ActivityType {
  cleaning_arranging_carrying,
  preparing_food,
  driving,
  gardening,
  caring_for_pets,
  offline_shopping,
  housekeeping_other,
  eating_food,
  dressing,
  personal_hygiene,
  treatment,
  non_exercise_stepping,
  computer,
  tv,
  mobile_device,
  device_unspecified,
  cardio,
  strength_stretching,
  exercise_other,
  paperwork_desk_work,
  reading_on_paper,
  puzzle_table_game,
  crafting_artwork,
  theater,
  musical_instrument,
  nothing_waiting,
  napping,
  face_to_face,
  voice_call,
};

inline constexpr int kActivityTypeCount = 29;
inline constexpr int kSemanticCount = 9;

enum class EffortCategory {
  relaxed,
  no_effort,
  no_to_low,
  low,
  low_to_moderate,
  moderate,
  moderate_to_strenuous,
  strenuous,
  uncategorizable,
};

inline constexpr int kEffortCategoryCount = 9;

std::string_view to_string(Semantic s);
std::string_view to_string(ActivityType t);
std::string_view to_string(EffortCategory c);

std::optional<Semantic> semantic_from_string(std::string_view s);
std::optional<ActivityType> activity_type_from_string(std::string_view s);
std::optional<EffortCategory> effort_from_string(std::string_view s);

Semantic semantic_of(ActivityType t);

/// 1..7 for the ordered categories; relaxed and uncategorizable have none.
std::optional<int> effort_score(EffortCategory c);

template <typename E, int N>
constexpr std::array<E, N> all_values() {
  std::array<E, N> out{};
  for (int i = 0; i < N; ++i) out[i] = static_cast<E>(i);
  return out;
}

inline constexpr auto kAllActivityTypes = all_values<ActivityType, kActivityTypeCount>();
inline constexpr auto kAllSemantics = all_values<Semantic, kSemanticCount>();
inline constexpr auto kAllEffortCategories = all_values<EffortCategory, kEffortCategoryCount>();

}  // namespace mymove

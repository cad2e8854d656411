#include "mymove/taxonomy.hpp"

namespace mymove {

namespace {

constexpr std::array<std::string_view, kSemanticCount> kSemanticNames = {
    "housekeeping",  "self_maintenance",    "non_exercise_stepping",
    "screen_time",   "exercise",            "paperwork_desk_work",
    "hobby_leisure", "resting",             "social"};

struct TypeRow {
  std::string_view name;
  Semantic semantic;
};

constexpr std::array<TypeRow, kActivityTypeCount> kTypes = {{
    {"cleaning_arranging_carrying", Semantic::housekeeping},
    {"preparing_food", Semantic::housekeeping},
    {"driving", Semantic::housekeeping},
    {"gardening", Semantic::housekeeping},
    {"caring_for_pets", Semantic::housekeeping},
    {"offline_shopping", Semantic::housekeeping},
    {"housekeeping_other", Semantic::housekeeping},
    {"eating_food", Semantic::self_maintenance},
    {"dressing", Semantic::self_maintenance},
    {"personal_hygiene", Semantic::self_maintenance},
    {"treatment", Semantic::self_maintenance},
    {"non_exercise_stepping", Semantic::non_exercise_stepping},
    {"computer", Semantic::screen_time},
    {"tv", Semantic::screen_time},
    {"mobile_device", Semantic::screen_time},
    {"device_unspecified", Semantic::screen_time},
    {"cardio", Semantic::exercise},
    {"strength_stretching", Semantic::exercise},
    {"exercise_other", Semantic::exercise},
    {"paperwork_desk_work", Semantic::paperwork_desk_work},
    {"reading_on_paper", Semantic::hobby_leisure},
    {"puzzle_table_game", Semantic::hobby_leisure},
    {"crafting_artwork", Semantic::hobby_leisure},
    {"theater", Semantic::hobby_leisure},
    {"musical_instrument", Semantic::hobby_leisure},
    {"nothing_waiting", Semantic::resting},
    {"napping", Semantic::resting},
    {"face_to_face", Semantic::social},
    {"voice_call", Semantic::social},
}};

constexpr std::array<std::string_view, kEffortCategoryCount> kEffortNames = {
    "relaxed",  "no_effort",             "no_to_low", "low",            "low_to_moderate",
    "moderate", "moderate_to_strenuous", "strenuous", "uncategorizable"};

}  // namespace

std::string_view to_string(Semantic s) { return kSemanticNames[static_cast<int>(s)]; }
std::string_view to_string(ActivityType t) { return kTypes[static_cast<int>(t)].name; }
std::string_view to_string(EffortCategory c) { return kEffortNames[static_cast<int>(c)]; }

std::optional<Semantic> semantic_from_string(std::string_view s) {
  for (int i = 0; i < kSemanticCount; ++i)
    if (kSemanticNames[i] == s) return static_cast<Semantic>(i);
  return std::nullopt;
}

std::optional<ActivityType> activity_type_from_string(std::string_view s) {
  for (int i = 0; i < kActivityTypeCount; ++i)
    if (kTypes[i].name == s) return static_cast<ActivityType>(i);
  return std::nullopt;
}

std::optional<EffortCategory> effort_from_string(std::string_view s) {
  for (int i = 0; i < kEffortCategoryCount; ++i)
    if (kEffortNames[i] == s) return static_cast<EffortCategory>(i);
  return std::nullopt;
}

Semantic semantic_of(ActivityType t) { return kTypes[static_cast<int>(t)].semantic; }

std::optional<int> effort_score(EffortCategory c) {
  switch (c) {
    case EffortCategory::relaxed:
    case EffortCategory::uncategorizable:
      return std::nullopt;
    default:
      return static_cast<int>(c);  // no_effort=1 ... strenuous=7
  }
}

}  // namespace mymove

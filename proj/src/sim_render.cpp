#include <array>
#include <cctype>
#include <cmath>

#include <fmt/format.h>

#include "mymove/errors.hpp"
#include "mymove/sim.hpp"

namespace mymove {

namespace {

struct Phrase {
  std::string_view ing;   // "cooking dinner"
  std::string_view past;  // "cooked dinner"
};

// Every phrase tags back to its type through the bundled lexicon and carries
// no time, effort, or clause-splitting words.
std::vector<Phrase> phrases(ActivityType t) {
  using A = ActivityType;
  switch (t) {
    case A::cleaning_arranging_carrying:
      return {{"vacuuming the living room", "vacuumed the living room"}, {"doing the laundry", "did the laundry"},
              {"cleaning the kitchen", "cleaned the kitchen"}};
    case A::preparing_food:
      return {{"cooking a meal", "cooked a meal"}, {"baking bread", "baked bread"},
              {"preparing a salad", "prepared a salad"}};
    case A::driving: return {{"driving to church", "drove to church"}, {"driving to town", "drove to town"}};
    case A::gardening:
      return {{"weeding the flower beds", "weeded the flower beds"}, {"planting tomatoes", "planted tomatoes"}};
    case A::caring_for_pets: return {{"feeding the cat", "fed the cat"}, {"grooming the dog", "groomed the dog"}};
    case A::offline_shopping:
      return {{"grocery shopping", "went grocery shopping"}, {"shopping at the mall", "went shopping at the mall"}};
    case A::housekeeping_other: return {{"doing chores", "did chores"}, {"running errands", "ran errands"}};
    case A::eating_food: return {{"eating a meal", "ate a meal"}, {"having a snack", "had a snack"}};
    case A::dressing: return {{"getting dressed", "got dressed"}, {"putting on my clothes", "put on my clothes"}};
    case A::personal_hygiene:
      return {{"taking a shower", "took a shower"}, {"brushing my teeth", "brushed my teeth"}};
    case A::treatment:
      return {{"doing my physical therapy", "did my physical therapy"}, {"getting a massage", "got a massage"}};
    case A::non_exercise_stepping:
      return {{"walking up the stairs", "walked up the stairs"}, {"walking around the house", "walked around the house"}};
    case A::computer:
      return {{"working on the computer", "worked on the computer"}, {"answering emails", "answered emails"}};
    case A::tv: return {{"watching the news", "watched the news"}, {"watching tv", "watched tv"}};
    case A::mobile_device:
      return {{"scrolling on my phone", "scrolled on my phone"}, {"texting my daughter", "was texting my daughter"}};
    case A::device_unspecified:
      return {{"watching youtube videos", "watched youtube videos"}, {"streaming videos", "was streaming videos"}};
    case A::cardio: return {{"going for a walk", "went for a walk"}, {"riding my bike", "rode my bike"}};
    case A::strength_stretching: return {{"doing yoga", "did yoga"}, {"lifting weights", "lifted weights"}};
    case A::exercise_other: return {{"doing tai chi", "did tai chi"}, {"playing golf", "played golf"}};
    case A::paperwork_desk_work: return {{"paying bills", "paid bills"}, {"doing paperwork", "did paperwork"}};
    case A::reading_on_paper:
      return {{"reading the newspaper", "read the newspaper"}, {"reading a book", "read a book"}};
    case A::puzzle_table_game:
      return {{"doing a crossword puzzle", "did a crossword puzzle"}, {"playing cards", "played cards"}};
    case A::crafting_artwork: return {{"sewing a quilt", "did some sewing"}, {"knitting a scarf", "was knitting a scarf"}};
    case A::theater: return {{"attending a concert", "attended a concert"}, {"watching a play at the theater", "saw a play at the theater"}};
    case A::musical_instrument:
      return {{"playing the piano", "played the piano"}, {"practicing guitar", "practiced guitar"}};
    case A::nothing_waiting:
      return {{"waiting for the bus", "waited for the bus"}, {"sitting around", "was sitting around"}};
    case A::napping: return {{"taking a nap", "took a nap"}, {"napping on the couch", "napped on the couch"}};
    case A::face_to_face:
      return {{"chatting with a neighbor", "chatted with a neighbor"}, {"visiting with friends", "was visiting with friends"}};
    case A::voice_call: return {{"calling my sister", "called my sister"}, {"talking on the phone", "talked on the phone"}};
  }
  return {{"doing something", "did something"}};
}

std::vector<std::string_view> effort_phrases(EffortCategory c) {
  using E = EffortCategory;
  switch (c) {
    case E::relaxed: return {"It was very relaxed.", "I felt relaxed."};
    case E::no_effort: return {"It took no effort.", "No exertion."};
    case E::no_to_low: return {"Little to no effort.", "Little or no effort."};
    case E::low: return {"Light exertion.", "Low effort."};
    case E::low_to_moderate: return {"Light to moderate effort.", "Low to moderate exertion."};
    case E::moderate: return {"Moderate effort.", "Medium exertion."};
    case E::moderate_to_strenuous: return {"Moderate to high intensity.", "Medium to heavy effort."};
    case E::strenuous: return {"It was strenuous.", "It was exhausting."};
    case E::uncategorizable: return {"Not much effort.", "Nothing too strenuous."};
  }
  return {};
}

template <typename T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
  return v[rng() % v.size()];
}

std::string clock_phrase(Instant t, std::chrono::minutes offset, bool short_form) {
  auto local = t + offset;
  auto since_midnight = std::chrono::duration_cast<std::chrono::minutes>(local - floor_day(local)).count();
  int h = static_cast<int>(since_midnight / 60), m = static_cast<int>(since_midnight % 60);
  const char* mer = h >= 12 ? "pm" : "am";
  int h12 = h % 12 == 0 ? 12 : h % 12;
  if (m == 0 && short_form) return fmt::format("{} {}", h12, mer);
  return fmt::format("{}:{:02} {}", h12, m, mer);
}

int whole_minutes(Instant a, Instant b) {
  return static_cast<int>(std::lround(minutes_between(a, b)));
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

}  // namespace

std::string fill_template(std::string_view tmpl, std::string_view activity, std::string_view activity_past,
                          std::string_view time, std::string_view effort) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] != '{') {
      out += tmpl[i];
      continue;
    }
    auto close = tmpl.find('}', i);
    if (close == std::string_view::npos)
      throw Error(ErrorCode::kTemplate, fmt::format("unterminated placeholder at offset {}", i));
    auto key = tmpl.substr(i + 1, close - i - 1);
    if (key == "activity") out += activity;
    else if (key == "activity_past") out += activity_past;
    else if (key == "time") out += time;
    else if (key == "effort") out += effort;
    else throw Error(ErrorCode::kTemplate, fmt::format("unknown placeholder {{{}}}", key));
    i = close;
  }
  return out;
}

std::string render_transcript(const ScriptedActivity& a, const RenderContext& ctx, std::mt19937_64& rng) {
  const Phrase ph = pick(phrases(a.activity_type), rng);
  const bool short_clock = rng() % 2 == 0;
  const std::string s = clock_phrase(ctx.start, ctx.utc_offset, short_clock);
  const std::string e = clock_phrase(ctx.end, ctx.utc_offset, short_clock);
  const int elapsed = std::max(1, whole_minutes(ctx.start, ctx.ongoing ? ctx.submitted_at : ctx.end));
  const unsigned form = static_cast<unsigned>(rng() % 2);

  std::string time;  // bare phrase for custom templates
  std::string body;
  switch (a.cue) {
    case Completeness::complete:
      if (ctx.ongoing) {
        time = form == 0 ? fmt::format("since {}", s) : fmt::format("for the past {} minutes", elapsed);
        body = fmt::format("I have been {} {}.", ph.ing, time);
      } else {
        time = fmt::format("from {} to {}", s, e);
        body = form == 0 ? fmt::format("I {} {}.", ph.past, time) : fmt::format("{} I {}.", capitalize(time), ph.past);
      }
      break;
    case Completeness::incomplete:
      if (ctx.ongoing) {
        time = "earlier";
        body = fmt::format("I started {} earlier.", ph.ing);
      } else if (form == 0) {
        time = "just";
        body = fmt::format("I just finished {}.", ph.ing);
      } else {
        time = fmt::format("for about {} minutes", elapsed);
        body = fmt::format("I {} {}.", ph.past, time);
      }
      break;
    case Completeness::none:
      body = !ctx.ongoing ? fmt::format("I {}.", ph.past)
             : form == 0  ? fmt::format("I am {}.", ph.ing)
                          : fmt::format("I'm {}.", ph.ing);
      break;
  }
  std::string effort;
  if (a.effort) effort = std::string(pick(effort_phrases(*a.effort), rng));

  if (!a.transcript_template.empty())
    return fill_template(a.transcript_template, ph.ing, ph.past, time, effort);
  return effort.empty() ? body : body + " " + effort;
}

}  // namespace mymove

#include "mymove/extractor.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <regex>
#include <set>

#include <fmt/format.h>

#include "mymove/errors.hpp"

namespace mymove {

std::string_view to_string(Structure s) {
  switch (s) {
    case Structure::singleton: return "singleton";
    case Structure::sequential: return "sequential";
    case Structure::multitasking: return "multitasking";
    case Structure::compound: return "compound";
  }
  return "?";
}

std::string_view to_string(Completeness c) {
  switch (c) {
    case Completeness::none: return "none";
    case Completeness::incomplete: return "incomplete";
    case Completeness::complete: return "complete";
  }
  return "?";
}

std::string_view to_string(EndAnchor a) {
  switch (a) {
    case EndAnchor::explicit_end: return "explicit";
    case EndAnchor::at_submission: return "at_submission";
    case EndAnchor::unknown: return "unknown";
  }
  return "?";
}

std::optional<Structure> structure_from_string(std::string_view s) {
  for (auto v : {Structure::singleton, Structure::sequential, Structure::multitasking,
                 Structure::compound})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

std::optional<Completeness> completeness_from_string(std::string_view s) {
  for (auto v : {Completeness::none, Completeness::incomplete, Completeness::complete})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

std::string ClockTime::to_string() const {
  if (!pm) return fmt::format("{}:{:02}", hour, minute);
  return fmt::format("{}:{:02} {}", hour, minute, *pm ? "pm" : "am");
}

namespace {

using Range = std::pair<std::size_t, std::size_t>;

std::string replace_each(const std::string& s, const std::regex& re,
                         const std::function<std::string(const std::smatch&)>& fn) {
  std::string out;
  auto last = s.cbegin();
  for (std::sregex_iterator it(s.begin(), s.end(), re), end; it != end; ++it) {
    out.append(last, (*it)[0].first);
    out += fn(*it);
    last = (*it)[0].second;
  }
  out.append(last, s.cend());
  return out;
}

const std::map<std::string, int>& number_words() {
  static const std::map<std::string, int> m = {
      {"one", 1},      {"two", 2},        {"three", 3},     {"four", 4},     {"five", 5},
      {"six", 6},      {"seven", 7},      {"eight", 8},     {"nine", 9},     {"ten", 10},
      {"eleven", 11},  {"twelve", 12},    {"thirteen", 13}, {"fourteen", 14}, {"fifteen", 15},
      {"sixteen", 16}, {"seventeen", 17}, {"eighteen", 18}, {"nineteen", 19}, {"twenty", 20},
      {"thirty", 30},  {"forty", 40},     {"fifty", 50},    {"sixty", 60},   {"ninety", 90}};
  return m;
}

int parse_number(const std::string& w) {
  if (!w.empty() && std::isdigit(static_cast<unsigned char>(w[0]))) return std::stoi(w);
  auto sep = w.find_first_of(" -");
  if (sep != std::string::npos)
    return number_words().at(w.substr(0, sep)) + number_words().at(w.substr(sep + 1));
  return number_words().at(w);
}

const std::string kNumWord =
    "(?:(?:twenty|thirty|forty|fifty)[ -](?:one|two|three|four|five|six|seven|eight|nine)|"
    "one|two|three|four|five|six|seven|eight|nine|ten|eleven|twelve|thirteen|fourteen|"
    "fifteen|sixteen|seventeen|eighteen|nineteen|twenty|thirty|forty|fifty|sixty|ninety)";
const std::string kUnit = "(minutes?|mins?|hours?|hrs?|seconds?|secs?)";

std::vector<Range> split_sentences(std::string_view s) {
  std::vector<Range> out;
  std::size_t start = 0;
  auto push = [&](std::size_t b, std::size_t e) {
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    if (b < e) out.emplace_back(b, e);
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c != '.' && c != '!' && c != '?' && c != ';') continue;
    if (c == '.') {
      // 6.5 hours, a.m.
      if (i + 1 < s.size() && !std::isspace(static_cast<unsigned char>(s[i + 1]))) continue;
      if (i >= 2 && s[i - 1] == 'm' && s[i - 2] == '.') continue;
    }
    push(start, i);
    start = i + 1;
  }
  push(start, s.size());
  return out;
}

struct ClockHit {
  std::size_t begin = 0;
  std::size_t end = 0;
  ClockTime time;
};

std::vector<ClockHit> find_clocks(const std::string& s) {
  static const std::regex re(
      R"(\b(\d{1,2}):(\d{2})(?: ?([ap])\.?m\b\.?)?|\b(\d{1,2})(?: ?([ap])\.?m\b\.?| o'clock\b)|\b(noon|midnight)\b)");
  std::vector<ClockHit> out;
  for (std::sregex_iterator it(s.begin(), s.end(), re), end; it != end; ++it) {
    const auto& m = *it;
    ClockHit h;
    h.begin = static_cast<std::size_t>(m.position(0));
    h.end = h.begin + static_cast<std::size_t>(m.length(0));
    if (m[1].matched) {
      h.time.hour = std::stoi(m[1].str());
      h.time.minute = std::stoi(m[2].str());
      if (m[3].matched) h.time.pm = m[3].str() == "p";
    } else if (m[4].matched) {
      h.time.hour = std::stoi(m[4].str());
      if (m[5].matched) h.time.pm = m[5].str() == "p";
    } else {
      h.time.hour = m[6].str() == "noon" ? 12 : 0;
      h.time.pm = m[6].str() == "noon";
      if (!*h.time.pm) h.time.pm.reset();
    }
    if (h.time.minute > 59) continue;
    if (h.time.pm && (h.time.hour < 1 || h.time.hour > 12)) continue;
    if (h.time.hour > 23) continue;
    out.push_back(h);
  }
  return out;
}

bool ends_with_re(const std::string& prefix, const std::regex& re) {
  return std::regex_search(prefix, re);
}

}  // namespace

std::string normalize_quantities(std::string_view folded) {
  std::string s(folded);
  static const std::regex hour_and_half(R"(\b(?:an|one|a) hour and a half\b)");
  static const std::regex n_and_half("\\b(\\d+|" + kNumWord + ") and a half hours?\\b");
  static const std::regex hour_and_quarter(R"(\b(?:an|one|a) hour and a quarter\b)");
  static const std::regex half_hour(R"(\b(?:a )?half(?: an| a|-an)? ?-?hour\b)");
  static const std::regex quarter_hour(R"(\b(?:a )?quarter(?: of an| an)? hour\b)");
  static const std::regex couple(R"(\ba couple(?: of)? (minutes|hours)\b)");
  static const std::regex few(R"(\ba few (minutes|hours)\b)");
  static const std::regex one_unit(R"(\b(?:an|one|a) (hour|minute)\b)");
  static const std::regex hyphen_digits(R"(\b(\d+)-(minutes?|mins?|hours?|hrs?)\b)");
  static const std::regex word_unit("\\b(" + kNumWord + ")[ -]" + kUnit + "\\b");

  s = std::regex_replace(s, hour_and_half, "90 minutes");
  s = replace_each(s, n_and_half, [](const std::smatch& m) {
    return fmt::format("{} minutes", parse_number(m[1].str()) * 60 + 30);
  });
  s = std::regex_replace(s, hour_and_quarter, "75 minutes");
  s = std::regex_replace(s, half_hour, "30 minutes");
  s = std::regex_replace(s, quarter_hour, "15 minutes");
  s = std::regex_replace(s, couple, "2 $1");
  s = std::regex_replace(s, few, "3 $1");
  s = std::regex_replace(s, one_unit, "1 $1");
  s = std::regex_replace(s, hyphen_digits, "$1 $2");
  s = replace_each(s, word_unit, [](const std::smatch& m) {
    return fmt::format("{} {}", parse_number(m[1].str()), m[2].str());
  });
  return s;
}

TimeCue extract_time_cue(std::string_view text) {
  static const std::regex duration_re(
      R"(\b(\d+(?:\.\d+)?) ?(minutes?|mins?|hours?|hrs?|seconds?|secs?)\b)");
  static const std::regex connector(R"(^\s*(?:to|until|till|til|through|thru|-|and)\s*$)");
  static const std::regex since_re(R"(\bsince\s*$)");
  static const std::regex start_re(
      R"(\b(?:at|from|starting at|started at|start at|began at|beginning at)\s*$)");
  static const std::regex end_re(
      R"(\b(?:until|till|til|ended at|finished at|done at|by)\s*$)");
  static const std::regex completion(
      R"(\b(?:finished|completed|returned|got back|came back|got done|got home|came home|done with)\b)");
  static const std::regex past_last(
      R"(\b(?:past|last) \d+(?:\.\d+)? ?(?:minutes?|mins?|hours?|hrs?)\b)");
  static const std::regex so_far(R"(\bso far\b)");
  static const std::regex been(R"(\bbeen\b)");
  static const std::regex relative(
      R"(\b(?:this morning|this afternoon|this evening|earlier|yesterday|last night|tonight|all day|all morning|all afternoon|a while ago|recently)\b)");

  std::string s = normalize_quantities(fold_text(text).text);
  TimeCue cue;

  std::smatch dm;
  if (std::regex_search(s, dm, duration_re)) {
    double v = std::stod(dm[1].str());
    char u = dm[2].str()[0];
    cue.duration_min = u == 'h' ? v * 60.0 : (u == 's' ? v / 60.0 : v);
  }

  auto clocks = find_clocks(s);
  bool paired = false;
  std::optional<ClockTime> single_start, single_end, since_clock;
  bool bare_clock = false;
  for (std::size_t i = 0; i < clocks.size(); ++i) {
    if (!paired && i + 1 < clocks.size()) {
      std::string between = s.substr(clocks[i].end, clocks[i + 1].begin - clocks[i].end);
      if (std::regex_match(between, connector)) {
        cue.start_clock = clocks[i].time;
        cue.end_clock = clocks[i + 1].time;
        paired = true;
        ++i;
        continue;
      }
    }
    std::size_t from = i > 0 ? clocks[i - 1].end : 0;
    from = std::max(from, clocks[i].begin > 24 ? clocks[i].begin - 24 : std::size_t{0});
    std::string before = s.substr(from, clocks[i].begin - from);
    if (ends_with_re(before, since_re)) {
      if (!since_clock) since_clock = clocks[i].time;
    } else if (ends_with_re(before, end_re)) {
      if (!single_end) single_end = clocks[i].time;
    } else if (ends_with_re(before, start_re)) {
      if (!single_start) single_start = clocks[i].time;
    } else {
      bare_clock = true;
    }
  }

  // "from 9 to 10": bare hours only count as clocks inside a range.
  static const std::regex bare_pair(
      R"(\b(?:from|between) (\d{1,2})(?::(\d{2}))? ?(?:to|until|till|til|through|-|and) ?(\d{1,2})(?::(\d{2}))?(?: ?([ap])\.?m\b)?(?! ?(?:minutes?|mins?|hours?|hrs?|[0-9:]|[ap]\.?m)))");
  std::smatch bp;
  if (!paired && std::regex_search(s, bp, bare_pair)) {
    ClockTime a{std::stoi(bp[1].str()), bp[2].matched ? std::stoi(bp[2].str()) : 0, std::nullopt};
    ClockTime b{std::stoi(bp[3].str()), bp[4].matched ? std::stoi(bp[4].str()) : 0, std::nullopt};
    if (bp[5].matched) {
      b.pm = bp[5].str() == "p";
      if (a.hour <= b.hour && a.hour >= 1) a.pm = b.pm;
    }
    bool valid = a.hour <= 23 && b.hour <= 23 && a.minute < 60 && b.minute < 60 &&
                 (!b.pm || (b.hour >= 1 && b.hour <= 12)) && (!a.pm || (a.hour >= 1 && a.hour <= 12));
    if (valid) {
      cue.start_clock = a;
      cue.end_clock = b;
      paired = true;
      single_start.reset();
      single_end.reset();
      bare_clock = false;
    }
  }

  bool completed = std::regex_search(s, completion);
  bool anchored = completed || std::regex_search(s, past_last) || std::regex_search(s, so_far);
  if (cue.duration_min && !anchored) {
    for (auto [b, e] : split_sentences(s)) {
      std::string sentence = s.substr(b, e - b);
      if (std::regex_search(sentence, been) && std::regex_search(sentence, duration_re)) {
        anchored = true;
        break;
      }
    }
  }
  bool rel = std::regex_search(s, relative);

  if (paired) {
    cue.completeness = Completeness::complete;
    cue.end_anchor = EndAnchor::explicit_end;
  } else if (since_clock) {
    cue.start_clock = since_clock;
    cue.since = true;
    cue.completeness = Completeness::complete;
    cue.end_anchor = EndAnchor::at_submission;
  } else if (cue.duration_min && anchored) {
    cue.completeness = Completeness::complete;
    cue.end_anchor = EndAnchor::at_submission;
  } else if (cue.duration_min && single_start) {
    cue.start_clock = single_start;
    cue.completeness = Completeness::complete;
    cue.end_anchor = EndAnchor::unknown;
  } else if (cue.duration_min && single_end) {
    cue.end_clock = single_end;
    cue.completeness = Completeness::complete;
    cue.end_anchor = EndAnchor::explicit_end;
  } else {
    if (single_start) cue.start_clock = single_start;
    if (single_end) cue.end_clock = single_end;
    bool any = cue.duration_min || single_start || single_end || bare_clock || completed ||
               anchored || rel;
    cue.completeness = any ? Completeness::incomplete : Completeness::none;
    if (single_end) cue.end_anchor = EndAnchor::explicit_end;
    else if (completed) cue.end_anchor = EndAnchor::at_submission;
  }
  return cue;
}

namespace {

std::vector<int> readings(const ClockTime& c) {
  if (c.pm) return {c.hour % 12 * 60 + (*c.pm ? 720 : 0) + c.minute};
  if (c.hour == 0 || c.hour >= 13) return {c.hour * 60 + c.minute};
  if (c.hour == 12) return {12 * 60 + c.minute, c.minute};
  return {c.hour * 60 + c.minute, (c.hour + 12) * 60 + c.minute};
}

}  // namespace

std::optional<Interval> resolve_timespan(const TimeCue& cue, Instant submitted_at,
                                         const ExtractorConfig& cfg) {
  if (cue.completeness != Completeness::complete) return std::nullopt;
  const Millis offset = cfg.utc_offset;
  const Instant day0 = floor_day(submitted_at + offset) - offset;
  const Instant limit = submitted_at + cfg.future_tolerance;
  auto at = [&](int minute_of_day) { return day0 + std::chrono::minutes{minute_of_day}; };
  const Millis dur = cue.duration_min ? Millis{static_cast<std::int64_t>(*cue.duration_min * 60000.0 + 0.5)}
                                      : Millis{0};
  const Millis kDay = std::chrono::hours{24};

  auto future = [&]() -> std::optional<Interval> {
    throw Error(ErrorCode::kFutureInterval,
                fmt::format("interval ends after {}", format_iso(submitted_at)));
  };

  if (cue.start_clock && cue.end_clock) {
    std::optional<Interval> best;
    bool any = false;
    for (int s : readings(*cue.start_clock))
      for (int e : readings(*cue.end_clock)) {
        if (s >= e) continue;
        any = true;
        Interval iv{at(s), at(e)};
        if (iv.end > limit) continue;
        if (!best || iv.end > best->end || (iv.end == best->end && iv.length() < best->length()))
          best = iv;
      }
    if (best) return best;
    if (any) return future();
    return std::nullopt;
  }
  if (cue.since && cue.start_clock) {
    std::optional<Instant> best;
    for (int s : readings(*cue.start_clock))
      if (at(s) < submitted_at && (!best || at(s) > *best)) best = at(s);
    if (!best) return future();
    return Interval{*best, submitted_at};
  }
  if (dur <= Millis{0} || dur > kDay) return std::nullopt;
  if (cue.end_anchor == EndAnchor::at_submission) return Interval{submitted_at - dur, submitted_at};
  if (cue.start_clock) {
    std::optional<Instant> best;
    for (int s : readings(*cue.start_clock))
      if (at(s) + dur <= limit && (!best || at(s) > *best)) best = at(s);
    if (!best) return future();
    return Interval{*best, *best + dur};
  }
  if (cue.end_clock) {
    std::optional<Instant> best;
    for (int e : readings(*cue.end_clock))
      if (at(e) <= limit && (!best || at(e) > *best)) best = at(e);
    if (!best) return future();
    return Interval{*best - dur, *best};
  }
  return std::nullopt;
}

namespace {

struct Clause {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string lead;        // split marker that opened the clause
  std::string first_word;  // first word of the clause text
  std::optional<LexMatch> best;
};

const std::set<std::string>& ing_stoplist() {
  static const std::set<std::string> s = {
      "morning", "evening", "thing",    "nothing", "something", "anything", "everything",
      "during",  "bring",   "king",     "ring",    "sing",      "string",   "spring",
      "ceiling", "building", "wedding", "pudding", "sibling",   "ping",     "wing",
      "swing",   "ding",    "sling",    "cling",   "thing",     "bring",    "offering"};
  return s;
}

bool has_ing_word(std::string_view clause) {
  static const std::regex ing(R"(\b[a-z]{2,}ing\b)");
  std::string c(clause);
  for (std::sregex_iterator it(c.begin(), c.end(), ing), end; it != end; ++it)
    if (!ing_stoplist().count(it->str())) return true;
  return false;
}

bool starts_with_posture(std::string_view clause) {
  static const std::set<std::string> skip = {"and", "i'm", "i", "am", "was", "been", "i've",
                                             "just", "then", "while", "as", "still", "now"};
  static const std::set<std::string> posture = {"seated", "sitting", "lying", "laying", "standing"};
  std::size_t i = 0;
  while (i < clause.size()) {
    while (i < clause.size() && !std::isalpha(static_cast<unsigned char>(clause[i])) && clause[i] != '\'') ++i;
    std::size_t j = i;
    while (j < clause.size() && (std::isalpha(static_cast<unsigned char>(clause[j])) || clause[j] == '\'')) ++j;
    if (j == i) return false;
    std::string w(clause.substr(i, j - i));
    if (posture.count(w)) return true;
    if (!skip.count(w)) return false;
    i = j;
  }
  return false;
}

std::string first_word_of(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && !std::isalpha(static_cast<unsigned char>(s[i]))) ++i;
  std::size_t j = i;
  while (j < s.size() && (std::isalpha(static_cast<unsigned char>(s[j])) || s[j] == '\'')) ++j;
  return std::string(s.substr(i, j - i));
}

std::vector<Clause> split_clauses(const std::string& f) {
  static const std::regex marker(
      R"(\b(and then|and now|after that|afterwards|then|and|while|before|after|but|so)\b)");
  std::vector<Clause> out;
  for (auto [sb, se] : split_sentences(f)) {
    struct Cut {
      std::size_t end;     // end of the clause before the cut
      std::size_t next;    // start of the clause after it
      std::string lead;
    };
    std::vector<Cut> cuts;
    std::string sentence = f.substr(sb, se - sb);
    for (std::size_t i = 0; i < sentence.size(); ++i)
      if (sentence[i] == ',') cuts.push_back({sb + i, sb + i + 1, ""});
    for (std::sregex_iterator it(sentence.begin(), sentence.end(), marker), end; it != end; ++it) {
      std::string m = it->str();
      std::size_t pos = static_cast<std::size_t>(it->position(0));
      std::string rest = sentence.substr(pos + m.size(), 10);
      if (m == "and" && (rest.rfind(" a half", 0) == 0 || rest.rfind(" a quarter", 0) == 0)) continue;
      if (m == "so" && (rest.rfind(" far", 0) == 0 || rest.rfind(" on", 0) == 0 ||
                        rest.rfind(" much", 0) == 0 || rest.rfind(" many", 0) == 0))
        continue;
      cuts.push_back({sb + pos, sb + pos, m});
    }
    std::sort(cuts.begin(), cuts.end(), [](const Cut& a, const Cut& b) { return a.end < b.end; });
    std::size_t start = sb;
    std::string lead;
    auto emit = [&](std::size_t b, std::size_t e, const std::string& ld) {
      while (b < e && (std::isspace(static_cast<unsigned char>(f[b])) || f[b] == ',')) ++b;
      while (e > b && (std::isspace(static_cast<unsigned char>(f[e - 1])) || f[e - 1] == ',')) --e;
      if (b >= e) return false;
      Clause c;
      c.begin = b;
      c.end = e;
      c.lead = ld;
      c.first_word = first_word_of(std::string_view(f).substr(b, e - b));
      out.push_back(std::move(c));
      return true;
    };
    for (const auto& cut : cuts) {
      if (cut.end < start) continue;
      // An empty segment (", and") hands its marker on to the next clause.
      if (emit(start, cut.end, lead)) lead.clear();
      start = cut.next;
      if (!cut.lead.empty()) lead = cut.lead;
    }
    emit(start, se, lead);
  }
  return out;
}

struct Group {
  ActivityType type;
  std::size_t first = 0;  // clause indices, inclusive
  std::size_t last = 0;
  std::vector<std::size_t> tagged;
};

Relation relate(const std::vector<Clause>& clauses, const std::string& f, const Group& a,
                const Group& b) {
  static const std::set<std::string> seq_words = {"then",  "and then", "and now", "after that",
                                                  "afterwards", "after", "before", "now",
                                                  "later", "next", "finally", "first"};
  static const std::set<std::string> sim_words = {"while", "as", "meanwhile"};
  std::size_t c1 = a.tagged.back();
  std::size_t c2 = b.tagged.front();
  bool sim_marker = false;
  for (std::size_t i = c1 + 1; i <= c2; ++i) {
    const auto& c = clauses[i];
    if (seq_words.count(c.lead) || seq_words.count(c.first_word)) return Relation::sequential;
    if (sim_words.count(c.lead) || sim_words.count(c.first_word)) sim_marker = true;
  }
  if (sim_marker) return Relation::simultaneous;
  auto text = [&](std::size_t i) {
    return std::string_view(f).substr(clauses[i].begin, clauses[i].end - clauses[i].begin);
  };
  static const std::regex sim_phrase(R"(\b(?:in front of|while|at the same time)\b)");
  for (std::size_t i : {c1, c2}) {
    std::string t(text(i));
    if (std::regex_search(t, sim_phrase)) return Relation::simultaneous;
  }
  if (starts_with_posture(text(c2))) return Relation::simultaneous;
  if (has_ing_word(text(c1)) && has_ing_word(text(c2))) return Relation::simultaneous;
  return Relation::sequential;
}

struct Analysis {
  FoldedText folded;
  std::vector<Clause> clauses;
  std::vector<Group> groups;
  std::vector<Relation> relations;  // between consecutive groups
  Structure structure = Structure::singleton;
  std::vector<LexMatch> matches;
};

Analysis analyze(const Lexicon& lex, std::string_view text) {
  Analysis a;
  a.folded = fold_text(text);
  const std::string& f = a.folded.text;
  bool blank = std::all_of(f.begin(), f.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
  if (blank) throw Error(ErrorCode::kEmptyTranscript, "transcript is empty");

  a.matches = lex.match_all(f);
  a.clauses = split_clauses(f);
  bool strong = std::any_of(a.matches.begin(), a.matches.end(), [](const LexMatch& m) {
    return m.field == LexField::activity_type && m.priority >= kWeakPriority;
  });
  for (auto& c : a.clauses) {
    for (const auto& m : a.matches) {
      if (m.field != LexField::activity_type || m.begin < c.begin || m.begin >= c.end) continue;
      if (strong && m.priority < kWeakPriority) continue;
      if (!c.best || better_match(m, *c.best)) c.best = m;
    }
  }

  std::vector<std::size_t> leading;
  for (std::size_t i = 0; i < a.clauses.size(); ++i) {
    const auto& c = a.clauses[i];
    if (!c.best) {
      if (a.groups.empty()) leading.push_back(i);
      else a.groups.back().last = i;
      continue;
    }
    auto type = static_cast<ActivityType>(c.best->value);
    if (!a.groups.empty() && a.groups.back().type == type) {
      a.groups.back().last = i;
      a.groups.back().tagged.push_back(i);
    } else {
      a.groups.push_back({type, i, i, {i}});
    }
  }
  if (!a.groups.empty() && !leading.empty()) a.groups.front().first = leading.front();

  for (std::size_t g = 1; g < a.groups.size(); ++g)
    a.relations.push_back(relate(a.clauses, f, a.groups[g - 1], a.groups[g]));
  if (a.groups.size() > 1) {
    bool seq = std::any_of(a.relations.begin(), a.relations.end(),
                           [](Relation r) { return r == Relation::sequential; });
    bool sim = std::any_of(a.relations.begin(), a.relations.end(),
                           [](Relation r) { return r == Relation::simultaneous; });
    a.structure = seq && sim ? Structure::compound
                             : (seq ? Structure::sequential : Structure::multitasking);
  }
  return a;
}

SourceSpan to_source(const FoldedText& f, std::size_t b, std::size_t e) {
  return {f.to_original[b], f.to_original[e]};
}

}  // namespace

Segmentation segment_report(const Lexicon& lex, const Transcript& t) {
  Analysis a = analyze(lex, t.text);
  Segmentation seg;
  seg.structure = a.structure;
  if (a.groups.empty()) {
    seg.spans.push_back({to_source(a.folded, 0, a.folded.text.size()), std::nullopt, std::nullopt});
    return seg;
  }
  for (std::size_t g = 0; g < a.groups.size(); ++g) {
    const auto& grp = a.groups[g];
    ActivitySpan span;
    span.span = to_source(a.folded, a.clauses[grp.first].begin, a.clauses[grp.last].end);
    span.activity_type = grp.type;
    if (g > 0) span.relation_to_previous = a.relations[g - 1];
    seg.spans.push_back(span);
  }
  return seg;
}

std::optional<std::pair<ActivityType, Semantic>> tag_activity(const Lexicon& lex,
                                                              std::string_view span) {
  auto f = fold_text(span);
  std::optional<LexMatch> best;
  auto matches = lex.match_all(f.text);
  bool strong = std::any_of(matches.begin(), matches.end(), [](const LexMatch& m) {
    return m.field == LexField::activity_type && m.priority >= kWeakPriority;
  });
  for (const auto& m : matches) {
    if (m.field != LexField::activity_type) continue;
    if (strong && m.priority < kWeakPriority) continue;
    if (!best || better_match(m, *best)) best = m;
  }
  if (!best) return std::nullopt;
  auto type = static_cast<ActivityType>(best->value);
  return std::make_pair(type, semantic_of(type));
}

std::optional<EffortCue> extract_effort(const Lexicon& lex, std::string_view text) {
  auto f = fold_text(text);
  std::optional<LexMatch> best;
  for (const auto& m : lex.match_all(f.text)) {
    if (m.field != LexField::effort) continue;
    if (!best || better_match(m, *best)) best = m;
  }
  if (!best) return std::nullopt;
  auto c = static_cast<EffortCategory>(best->value);
  return EffortCue{c, effort_score(c)};
}

std::vector<ExtractedActivity> extract_report(const Lexicon& lex, const Transcript& t,
                                              const ExtractorConfig& cfg) {
  Analysis a = analyze(lex, t.text);
  TimeCue report_cue = extract_time_cue(t.text);

  std::optional<EffortCue> effort;
  {
    std::optional<LexMatch> best;
    for (const auto& m : a.matches)
      if (m.field == LexField::effort && (!best || better_match(m, *best))) best = m;
    if (best) {
      auto c = static_cast<EffortCategory>(best->value);
      effort = EffortCue{c, effort_score(c)};
    }
  }

  struct Member {
    std::optional<ActivityType> type;
    SourceSpan span;
    TimeCue cue;
  };
  std::vector<Member> members;
  if (a.groups.empty()) {
    members.push_back({std::nullopt, to_source(a.folded, 0, a.folded.text.size()), report_cue});
  } else {
    for (const auto& g : a.groups)
      members.push_back({g.type, to_source(a.folded, a.clauses[g.first].begin, a.clauses[g.last].end),
                         report_cue});
  }

  if (a.structure == Structure::sequential || a.structure == Structure::compound) {
    std::size_t complete = 0;
    for (auto& m : members) {
      m.cue = extract_time_cue(std::string_view(t.text).substr(m.span.begin, m.span.end - m.span.begin));
      if (m.cue.completeness == Completeness::complete) ++complete;
    }
    bool sequence_level = complete == 1 && members.size() > 1;
    for (auto& m : members) {
      if (report_cue.completeness == Completeness::none) {
        m.cue = TimeCue{};
      } else if (sequence_level) {
        m.cue = report_cue;
        m.cue.completeness = Completeness::incomplete;
      } else if (m.cue.completeness == Completeness::none) {
        m.cue.completeness = Completeness::incomplete;
      }
    }
  }

  std::vector<ExtractedActivity> out;
  for (std::size_t i = 0; i < members.size(); ++i) {
    ExtractedActivity x;
    x.activity_id = fmt::format("{}#{}", t.report_id, i);
    x.report_id = t.report_id;
    x.device_id = t.device_id;
    x.participant_id = t.participant_id;
    x.method = t.method;
    x.submitted_at = t.submitted_at;
    x.structure = a.structure;
    x.index = static_cast<int>(i);
    x.activity_type = members[i].type;
    if (x.activity_type) x.semantic = semantic_of(*x.activity_type);
    x.time_cue = members[i].cue;
    x.effort = effort;
    x.source_span = members[i].span;
    if (x.time_cue.completeness == Completeness::complete) {
      try {
        x.timespan = resolve_timespan(x.time_cue, t.submitted_at, cfg);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kFutureInterval) throw;
      }
    }
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace mymove

#include "mymove/lexicon.hpp"

#include <charconv>

#include <fmt/format.h>

#include "mymove/errors.hpp"

namespace mymove {

FoldedText fold_text(std::string_view s) {
  FoldedText f;
  f.text.reserve(s.size());
  f.to_original.reserve(s.size() + 1);
  for (std::size_t i = 0; i < s.size();) {
    auto c = static_cast<unsigned char>(s[i]);
    // U+2018/U+2019 quotes and U+2013/U+2014 dashes arrive from phone keyboards.
    if (c == 0xE2 && i + 2 < s.size() && static_cast<unsigned char>(s[i + 1]) == 0x80) {
      auto d = static_cast<unsigned char>(s[i + 2]);
      char repl = 0;
      if (d == 0x98 || d == 0x99) repl = '\'';
      else if (d == 0x93 || d == 0x94) repl = '-';
      else if (d == 0x9C || d == 0x9D) repl = '"';
      if (repl) {
        f.text.push_back(repl);
        f.to_original.push_back(i);
        i += 3;
        continue;
      }
    }
    f.text.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
    f.to_original.push_back(i);
    ++i;
  }
  f.to_original.push_back(s.size());
  return f;
}

bool better_match(const LexMatch& a, const LexMatch& b) {
  if (a.priority != b.priority) return a.priority > b.priority;
  if (a.length() != b.length()) return a.length() > b.length();
  return a.begin < b.begin;
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

Lexicon Lexicon::parse(std::string_view tsv) {
  Lexicon lex;
  int line_no = 0;
  for (auto raw : split(tsv, '\n')) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto cols = split(line, '\t');
    if (line_no == 1 && trim(cols[0]) == "pattern") continue;
    if (cols.size() != 4)
      throw Error(ErrorCode::kLexicon, fmt::format("line {}: expected 4 columns, got {}", line_no, cols.size()));
    LexiconEntry e;
    e.pattern = std::string(trim(cols[0]));
    auto field = trim(cols[1]);
    auto value = trim(cols[2]);
    if (field == "activity_type") {
      auto t = activity_type_from_string(value);
      if (!t) throw Error(ErrorCode::kLexicon, fmt::format("line {}: unknown activity type '{}'", line_no, value));
      e.field = LexField::activity_type;
      e.value = static_cast<int>(*t);
    } else if (field == "effort") {
      auto c = effort_from_string(value);
      if (!c) throw Error(ErrorCode::kLexicon, fmt::format("line {}: unknown effort '{}'", line_no, value));
      e.field = LexField::effort;
      e.value = static_cast<int>(*c);
    } else {
      throw Error(ErrorCode::kLexicon, fmt::format("line {}: unknown field '{}'", line_no, field));
    }
    auto prio = trim(cols[3]);
    auto [p, ec] = std::from_chars(prio.data(), prio.data() + prio.size(), e.priority);
    if (ec != std::errc{} || p != prio.data() + prio.size())
      throw Error(ErrorCode::kLexicon, fmt::format("line {}: bad priority '{}'", line_no, prio));
    try {
      lex.add(std::move(e));
    } catch (const Error& err) {
      throw Error(ErrorCode::kLexicon, fmt::format("line {}: {}", line_no, err.what()));
    }
  }
  return lex;
}

Lexicon Lexicon::bundled() { return parse(bundled::lexicon_tsv()); }

void Lexicon::add(LexiconEntry entry) {
  std::string lowered;
  for (char c : entry.pattern) lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  try {
    compiled_.emplace_back("\\b(?:" + lowered + ")\\b",
                           std::regex::ECMAScript | std::regex::optimize);
  } catch (const std::regex_error& e) {
    throw Error(ErrorCode::kLexicon, fmt::format("bad pattern '{}': {}", entry.pattern, e.what()));
  }
  entries_.push_back(std::move(entry));
}

void Lexicon::append(const Lexicon& other) {
  for (std::size_t i = 0; i < other.entries_.size(); ++i) {
    entries_.push_back(other.entries_[i]);
    compiled_.push_back(other.compiled_[i]);
  }
}

std::vector<LexMatch> Lexicon::match_all(std::string_view folded) const {
  std::vector<LexMatch> out;
  for (std::size_t i = 0; i < compiled_.size(); ++i) {
    const auto& e = entries_[i];
    for (auto it = std::cregex_iterator(folded.data(), folded.data() + folded.size(), compiled_[i]);
         it != std::cregex_iterator(); ++it) {
      auto pos = static_cast<std::size_t>(it->position(0));
      auto len = static_cast<std::size_t>(it->length(0));
      if (len == 0) continue;
      out.push_back({pos, pos + len, e.field, e.value, e.priority});
    }
  }
  return out;
}

std::string Lexicon::to_tsv_row(const LexiconEntry& e) {
  std::string_view value = e.field == LexField::activity_type
                               ? to_string(static_cast<ActivityType>(e.value))
                               : to_string(static_cast<EffortCategory>(e.value));
  return fmt::format("{}\t{}\t{}\t{}", e.pattern,
                     e.field == LexField::activity_type ? "activity_type" : "effort", value,
                     e.priority);
}

}  // namespace mymove

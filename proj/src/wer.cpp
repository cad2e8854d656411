#include <algorithm>
#include <cctype>
#include <string>
#include <unordered_map>

#include <fmt/format.h>

#include "mymove/analytics.hpp"
#include "mymove/errors.hpp"
#include "mymove/lexicon.hpp"

namespace mymove {

namespace {

const std::unordered_map<std::string, std::string>& contractions() {
  static const std::unordered_map<std::string, std::string> table = {
      {"i'm", "i am"},         {"you're", "you are"},     {"we're", "we are"},
      {"they're", "they are"}, {"it's", "it is"},         {"that's", "that is"},
      {"there's", "there is"}, {"what's", "what is"},     {"he's", "he is"},
      {"she's", "she is"},     {"here's", "here is"},     {"where's", "where is"},
      {"who's", "who is"},     {"let's", "let us"},       {"i've", "i have"},
      {"you've", "you have"},  {"we've", "we have"},      {"they've", "they have"},
      {"i'll", "i will"},      {"you'll", "you will"},    {"we'll", "we will"},
      {"they'll", "they will"}, {"it'll", "it will"},     {"he'll", "he will"},
      {"she'll", "she will"},  {"i'd", "i would"},        {"you'd", "you would"},
      {"he'd", "he would"},    {"she'd", "she would"},    {"we'd", "we would"},
      {"they'd", "they would"}, {"can't", "can not"},     {"cannot", "can not"},
      {"won't", "will not"},   {"don't", "do not"},       {"doesn't", "does not"},
      {"didn't", "did not"},   {"isn't", "is not"},       {"aren't", "are not"},
      {"wasn't", "was not"},   {"weren't", "were not"},   {"haven't", "have not"},
      {"hasn't", "has not"},   {"hadn't", "had not"},     {"couldn't", "could not"},
      {"wouldn't", "would not"}, {"shouldn't", "should not"}, {"mustn't", "must not"},
      {"ain't", "am not"},     {"y'all", "you all"},      {"gonna", "going to"},
      {"wanna", "want to"},    {"gotta", "got to"},
  };
  return table;
}

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

// Drops punctuation; '.' and ':' survive only between two digits.
std::string scrub(const std::string& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(w[i]);
    if (is_word_byte(c)) {
      out += static_cast<char>(c);
    } else if ((c == ':' || c == '.') && i > 0 && i + 1 < w.size() &&
               std::isdigit(static_cast<unsigned char>(w[i - 1])) &&
               std::isdigit(static_cast<unsigned char>(w[i + 1]))) {
      out += static_cast<char>(c);
    }
  }
  return out;
}

void split_into(const std::string& s, std::vector<std::string>& out, bool expand) {
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j == i) break;
    std::string tok = s.substr(i, j - i);
    i = j;
    auto b = tok.find_first_not_of("\"'()[]{}<>,.;:!?*`");
    auto e = tok.find_last_not_of("\"'()[]{}<>,.;:!?*`");
    if (b == std::string::npos) continue;
    tok = tok.substr(b, e - b + 1);
    if (expand) {
      auto it = contractions().find(tok);
      if (it != contractions().end()) {
        split_into(it->second, out, false);
        continue;
      }
    }
    std::replace_if(tok.begin(), tok.end(), [](char c) { return c == '-' || c == '/'; }, ' ');
    if (tok.find(' ') != std::string::npos) {
      split_into(tok, out, expand);
      continue;
    }
    auto w = scrub(tok);
    if (!w.empty()) out.push_back(std::move(w));
  }
}

}  // namespace

std::vector<std::string> normalize_text(std::string_view s) {
  std::string folded = fold_text(s).text;
  std::vector<std::string> out;
  split_into(folded, out, true);
  return out;
}

std::size_t edit_distance(std::span<const std::string> ref, std::span<const std::string> hyp) {
  std::vector<std::size_t> prev(hyp.size() + 1), cur(hyp.size() + 1);
  for (std::size_t j = 0; j <= hyp.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= ref.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= hyp.size(); ++j) {
      std::size_t sub = prev[j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[hyp.size()];
}

double wer(std::string_view reference, std::string_view hypothesis) {
  auto r = normalize_text(reference);
  if (r.empty()) throw Error(ErrorCode::kEmptyReference, "reference has no tokens after normalization");
  auto h = normalize_text(hypothesis);
  return static_cast<double>(edit_distance(r, h)) / static_cast<double>(r.size());
}

WerTotals corpus_wer(std::span<const std::string> refs, std::span<const std::string> hyps) {
  if (refs.size() != hyps.size())
    throw Error(ErrorCode::kInvalidArgument, fmt::format("{} references vs {} hypotheses", refs.size(), hyps.size()));
  WerTotals t;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    auto r = normalize_text(refs[i]);
    if (r.empty()) throw Error(ErrorCode::kEmptyReference, fmt::format("reference {} is empty", i));
    auto h = normalize_text(hyps[i]);
    t.errors += edit_distance(r, h);
    t.reference_tokens += r.size();
  }
  return t;
}

}  // namespace mymove

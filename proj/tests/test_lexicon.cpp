#include <doctest.h>

#include <thread>

#include "mymove/errors.hpp"
#include "mymove/lexicon.hpp"

using namespace mymove;

namespace {

ErrorCode parse_error(std::string_view tsv) {
  try {
    Lexicon::parse(tsv);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("parse accepted bad TSV");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("bundled lexicon parses and covers every activity type") {
  auto lex = Lexicon::bundled();
  REQUIRE(lex.size() > 0);
  std::array<bool, kActivityTypeCount> seen{};
  std::array<bool, kEffortCategoryCount> effort{};
  for (const auto& e : lex.entries()) {
    if (e.field == LexField::activity_type) seen[e.value] = true;
    else effort[e.value] = true;
  }
  for (int t = 0; t < kActivityTypeCount; ++t) {
    CAPTURE(to_string(static_cast<ActivityType>(t)));
    CHECK(seen[t]);
  }
  for (int c = 0; c < kEffortCategoryCount; ++c) {
    CAPTURE(to_string(static_cast<EffortCategory>(c)));
    CHECK(effort[c]);
  }
}

TEST_CASE("TSV parsing") {
  auto lex = Lexicon::parse("pattern\tfield\tvalue\tpriority\n# comment\n\nbik(e|ing)\tactivity_type\tcardio\t60\n"
                            "no effort\teffort\tno_effort\t70\n");
  REQUIRE(lex.size() == 2);
  CHECK(lex.entries()[0].pattern == "bik(e|ing)");
  CHECK(lex.entries()[0].value == static_cast<int>(ActivityType::cardio));
  CHECK(lex.entries()[1].field == LexField::effort);
  CHECK(lex.entries()[1].priority == 70);

  CHECK(parse_error("a\tactivity_type\tcardio\n") == ErrorCode::kLexicon);
  CHECK(parse_error("a\tactivity_type\tflying\t60\n") == ErrorCode::kLexicon);
  CHECK(parse_error("a\tmood\tcardio\t60\n") == ErrorCode::kLexicon);
  CHECK(parse_error("a\teffort\tsuper\t60\n") == ErrorCode::kLexicon);
  CHECK(parse_error("a\tactivity_type\tcardio\thigh\n") == ErrorCode::kLexicon);
  CHECK(parse_error("(unclosed\tactivity_type\tcardio\t60\n") == ErrorCode::kLexicon);
}

TEST_CASE("to_tsv_row round-trips") {
  LexiconEntry e{"walk(ed|ing)? the dog", LexField::activity_type, static_cast<int>(ActivityType::caring_for_pets),
                 kOverridePriority};
  auto row = Lexicon::to_tsv_row(e);
  auto back = Lexicon::parse(row);
  REQUIRE(back.size() == 1);
  CHECK(back.entries()[0].pattern == e.pattern);
  CHECK(back.entries()[0].value == e.value);
  CHECK(back.entries()[0].priority == kOverridePriority);
}

TEST_CASE("matching is case-insensitive and bounded by words") {
  auto lex = Lexicon::parse("tv\tactivity_type\ttv\t60\n");
  auto f = fold_text("Watching TV now");
  auto hits = lex.match_all(f.text);
  REQUIRE(hits.size() == 1);
  CHECK(f.text.substr(hits[0].begin, hits[0].length()) == "tv");
  CHECK(lex.match_all(fold_text("tvs and stv").text).empty());
}

TEST_CASE("fold_text keeps a map back to the original") {
  auto f = fold_text("Ate BREAKFAST");
  CHECK(f.text == "ate breakfast");
  REQUIRE(f.to_original.size() == f.text.size() + 1);
  CHECK(f.to_original.back() == std::string("Ate BREAKFAST").size());
}

TEST_CASE("better_match orders by priority, then length, then position") {
  LexMatch low{0, 20, LexField::activity_type, 0, 40};
  LexMatch high{10, 12, LexField::activity_type, 1, 60};
  CHECK(better_match(high, low));
  CHECK_FALSE(better_match(low, high));
  LexMatch longer{5, 15, LexField::activity_type, 0, 60};
  LexMatch shorter{0, 4, LexField::activity_type, 0, 60};
  CHECK(better_match(longer, shorter));
  LexMatch early{0, 4, LexField::activity_type, 0, 60};
  LexMatch late{8, 12, LexField::activity_type, 0, 60};
  CHECK(better_match(early, late));
  CHECK_FALSE(better_match(early, early));
}

TEST_CASE("append adds override rows after the base") {
  auto base = Lexicon::parse("tv\tactivity_type\ttv\t60\n");
  base.append(Lexicon::parse("tv\tactivity_type\tcomputer\t100\n"));
  REQUIRE(base.size() == 2);
  auto hits = base.match_all("tv");
  REQUIRE(hits.size() == 2);
  const LexMatch* best = &hits[0];
  for (const auto& h : hits)
    if (better_match(h, *best)) best = &h;
  CHECK(best->value == static_cast<int>(ActivityType::computer));
}

TEST_CASE("registry swaps snapshots without disturbing readers") {
  auto first = std::make_shared<const Lexicon>(Lexicon::parse("tv\tactivity_type\ttv\t60\n"));
  LexiconRegistry reg(first);
  auto held = reg.snapshot();
  std::thread writer([&] {
    for (int i = 0; i < 200; ++i) reg.swap(std::make_shared<const Lexicon>(Lexicon::parse("tv\tactivity_type\ttv\t60\n")));
  });
  for (int i = 0; i < 200; ++i) CHECK(reg.snapshot()->size() == 1);
  writer.join();
  CHECK(held.get() == first.get());
  CHECK(held->size() == 1);
}

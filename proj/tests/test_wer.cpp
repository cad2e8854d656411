#include <doctest.h>

#include <random>

#include "mymove/analytics.hpp"
#include "mymove/errors.hpp"
#include "support/oracles.hpp"

using namespace mymove;

TEST_CASE("normalize_text") {
  CHECK(normalize_text("I'm walking.") == std::vector<std::string>{"i", "am", "walking"});
  CHECK(normalize_text("").empty());
  CHECK(normalize_text("until 6:47.") == std::vector<std::string>{"until", "6:47"});
  CHECK(normalize_text("Don't STOP, it's fine!") == std::vector<std::string>{"do", "not", "stop", "it", "is", "fine"});
}

TEST_CASE("wer examples") {
  CHECK(wer("I'm watching TV", "i am watching tv") == 0.0);
  CHECK(wer("eating lunch and about to get on a zoom call", "Eating lunch Ann about to get on a zoom call") ==
        doctest::Approx(0.1));
  CHECK(wer("a b c", "") == 1.0);
  CHECK(wer("a", "a b c d") == 3.0);
  try {
    wer("...", "x");
    FAIL("empty reference accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptyReference);
  }
}

TEST_CASE("edit distance equals the recursive oracle on random pairs") {
  std::mt19937 rng(21);
  const std::vector<std::string> vocab{"a", "b", "c", "d", "and", "ann"};
  auto words = [&](int max) {
    std::vector<std::string> w(rng() % (max + 1));
    for (auto& s : w) s = vocab[rng() % vocab.size()];
    return w;
  };
  for (int i = 0; i < 1000; ++i) {
    auto ref = words(12);
    auto hyp = words(12);
    REQUIRE(edit_distance(ref, hyp) == oracle::edit_distance(ref, hyp));
    REQUIRE(edit_distance(ref, ref) == 0);
  }
}

TEST_CASE("corpus wer pools errors over reference tokens") {
  std::vector<std::string> refs{"a b c d", "e f"};
  std::vector<std::string> hyps{"a b c d", "e g h"};
  auto t = corpus_wer(refs, hyps);
  CHECK(t.errors == 2);
  CHECK(t.reference_tokens == 6);
  CHECK(t.rate() == doctest::Approx(2.0 / 6.0));
  CHECK_THROWS_AS(corpus_wer(refs, std::vector<std::string>{"a"}), Error);
}

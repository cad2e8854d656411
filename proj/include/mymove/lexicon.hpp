#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "mymove/taxonomy.hpp"

namespace mymove {

enum class LexField { activity_type, effort };

/// Matches below this priority only count when nothing stronger fires
/// anywhere in the same report.
inline constexpr int kWeakPriority = 50;
inline constexpr int kOverridePriority = 100;

struct LexiconEntry {
  std::string pattern;
  LexField field = LexField::activity_type;
  int value = 0;  // ActivityType or EffortCategory as int
  int priority = 0;
};

struct LexMatch {
  std::size_t begin = 0;  // offsets into the folded text
  std::size_t end = 0;
  LexField field = LexField::activity_type;
  int value = 0;
  int priority = 0;

  std::size_t length() const { return end - begin; }
};

/// Lowercased text plus a map from folded offsets back to the original bytes.
struct FoldedText {
  std::string text;
  std::vector<std::size_t> to_original;  // size text.size() + 1
};

FoldedText fold_text(std::string_view original);

/// True when `a` should win over `b`: priority, then length, then position.
bool better_match(const LexMatch& a, const LexMatch& b);

class Lexicon {
 public:
  /// TSV columns: pattern, field, value, priority. Lines starting with '#'
  /// and a leading "pattern" header are skipped.
  static Lexicon parse(std::string_view tsv);
  static Lexicon bundled();

  void add(LexiconEntry entry);
  void append(const Lexicon& other);
  std::size_t size() const { return entries_.size(); }
  const std::vector<LexiconEntry>& entries() const { return entries_; }

  /// All matches of every entry over already-folded text.
  std::vector<LexMatch> match_all(std::string_view folded) const;

  static std::string to_tsv_row(const LexiconEntry& e);

 private:
  std::vector<LexiconEntry> entries_;
  std::vector<std::regex> compiled_;
};

/// Holds the current lexicon; readers take a snapshot, reloads swap it.
class LexiconRegistry {
 public:
  explicit LexiconRegistry(std::shared_ptr<const Lexicon> initial)
      : current_(std::move(initial)) {}

  std::shared_ptr<const Lexicon> snapshot() const {
    std::lock_guard lock(mu_);
    return current_;
  }
  void swap(std::shared_ptr<const Lexicon> next) {
    std::lock_guard lock(mu_);
    current_ = std::move(next);
  }

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const Lexicon> current_;
};

namespace bundled {
std::string_view lexicon_tsv();
std::string_view default_script_yaml();
}  // namespace bundled

}  // namespace mymove

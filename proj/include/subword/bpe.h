#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace subword {

// Appended to the last symbol of every word so merges can tell suffixes
// apart from word-internal material. Never appears in emitted units.
inline constexpr std::string_view kEndOfWord = "</w>";

struct MergeRule {
  std::string left;
  std::string right;

  friend bool operator==(const MergeRule&, const MergeRule&) = default;
};

// Ordered merge rules; rank is the index.
class MergeTable {
 public:
  MergeTable() = default;
  explicit MergeTable(std::vector<MergeRule> rules);

  std::size_t size() const { return rules_.size(); }
  bool empty() const { return rules_.empty(); }
  const std::vector<MergeRule>& rules() const { return rules_; }
  // Rank of (left, right) or -1.
  std::int64_t rank(std::string_view left, std::string_view right) const;

  // One `left right` pair per line.
  void save(std::ostream& out) const;
  static MergeTable load(std::istream& in);
  static MergeTable load_file(const std::string& path);

 private:
  std::vector<MergeRule> rules_;
  std::unordered_map<std::string, std::int64_t> ranks_;
};

// Learns up to n_merges rules from word types weighted by their counts.
// Each step merges the most frequent adjacent pair, ties resolved by the
// lexicographically smallest (left, right); stops once no pair occurs at
// least twice.
MergeTable train_bpe(const std::vector<std::pair<std::string, std::int64_t>>& word_counts,
                     std::size_t n_merges);

// Initial symbol sequence of a word: code points, the last one carrying the
// end-of-word marker.
std::vector<std::string> bpe_symbols(std::string_view word);

// Applies merges lowest rank first until none applies. The returned units
// concatenate back to `word`.
std::vector<std::string> apply_bpe(std::string_view word, const MergeTable& merges);

}  // namespace subword

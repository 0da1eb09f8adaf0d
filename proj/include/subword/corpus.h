#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace subword {

using WordId = std::int32_t;
using Rng = std::mt19937_64;

// Lowercases, replaces every decimal digit with '#', and splits on
// whitespace.
std::vector<std::string> preprocess_line(std::string_view raw);

struct WordCounts {
  std::unordered_map<std::string, std::int64_t> counts;
  std::int64_t total_tokens = 0;

  void merge(const WordCounts& other);
};

// Serial reference counter over already preprocessed lines.
WordCounts count_words_serial(const std::vector<std::vector<std::string>>& lines);
// Shards lines across OpenMP threads and merges the per-thread tables.
WordCounts count_words_parallel(const std::vector<std::vector<std::string>>& lines,
                                int workers);

class Vocabulary {
 public:
  struct Entry {
    std::string word;
    std::int64_t count;
  };

  Vocabulary() = default;

  // Keeps words with count >= min_count; ids follow descending count, ties
  // broken lexicographically. Throws std::invalid_argument("empty corpus")
  // when there is nothing to count.
  static Vocabulary from_counts(const WordCounts& counts, std::int64_t min_count);

  // Rebuilds a vocabulary from entries already in id order.
  static Vocabulary from_entries(std::vector<Entry> entries, std::int64_t total_tokens);

  WordId id(std::string_view word) const;  // -1 when absent
  bool contains(std::string_view word) const { return id(word) >= 0; }
  const std::string& word(WordId id) const { return entries_[static_cast<std::size_t>(id)].word; }
  std::int64_t count(WordId id) const { return entries_[static_cast<std::size_t>(id)].count; }
  std::size_t size() const { return entries_.size(); }
  std::int64_t total_tokens() const { return total_tokens_; }
  const std::vector<Entry>& entries() const { return entries_; }

  // `word<TAB>count` per line, id order.
  void save(std::ostream& out) const;
  static Vocabulary load(std::istream& in);

 private:
  void reindex();

  std::vector<Entry> entries_;
  std::unordered_map<std::string, WordId> index_;
  std::int64_t total_tokens_ = 0;
};

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& lines,
                            std::int64_t min_count, int workers = 1);

// min(1, sqrt(t/f) + t/f) with f = count / total.
double subsample_keep_probability(std::int64_t count, std::int64_t total, double t);

struct TrainingPair {
  WordId target;
  WordId context;

  friend bool operator==(const TrainingPair&, const TrainingPair&) = default;
};

// Draws the effective window for one position, uniform in [1, window].
int draw_window(Rng& rng, int window);

// For each position i (in order) one window b is drawn with draw_window and
// every j != i with |i - j| <= b yields (sentence[i], sentence[j]).
std::vector<TrainingPair> generate_pairs(const std::vector<WordId>& sentence, int window,
                                         Rng& rng);
void generate_pairs(const std::vector<WordId>& sentence, int window, Rng& rng,
                    std::vector<TrainingPair>& out);

// Reads a corpus (one sentence per line) and preprocesses every line.
std::vector<std::vector<std::string>> read_corpus(std::istream& in);
std::vector<std::vector<std::string>> read_corpus_file(const std::string& path);

// Maps tokens to ids, dropping words outside the vocabulary.
std::vector<std::vector<WordId>> encode_corpus(const std::vector<std::vector<std::string>>& lines,
                                               const Vocabulary& vocab);

}  // namespace subword

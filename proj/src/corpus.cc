#include "subword/corpus.h"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "subword/error.h"
#include "subword/text.h"

namespace subword {

std::vector<std::string> preprocess_line(std::string_view raw) {
  std::vector<std::string> tokens;
  for (std::string_view piece : split_whitespace(raw)) {
    std::u32string chars = utf8_decode(piece);
    for (char32_t& c : chars) {
      c = is_decimal_digit(c) ? U'#' : to_lower(c);
    }
    tokens.push_back(utf8_encode(chars));
  }
  return tokens;
}

void WordCounts::merge(const WordCounts& other) {
  for (const auto& [word, n] : other.counts) counts[word] += n;
  total_tokens += other.total_tokens;
}

WordCounts count_words_serial(const std::vector<std::vector<std::string>>& lines) {
  WordCounts out;
  for (const auto& line : lines) {
    for (const auto& tok : line) ++out.counts[tok];
    out.total_tokens += static_cast<std::int64_t>(line.size());
  }
  return out;
}

WordCounts count_words_parallel(const std::vector<std::vector<std::string>>& lines,
                                int workers) {
  if (workers <= 1) return count_words_serial(lines);
  std::vector<WordCounts> shards(static_cast<std::size_t>(workers));
  const auto n = static_cast<std::int64_t>(lines.size());
#pragma omp parallel num_threads(workers)
  {
    const int tid = omp_get_thread_num();
    WordCounts& local = shards[static_cast<std::size_t>(tid)];
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      const auto& line = lines[static_cast<std::size_t>(i)];
      for (const auto& tok : line) ++local.counts[tok];
      local.total_tokens += static_cast<std::int64_t>(line.size());
    }
  }
  WordCounts out = std::move(shards.front());
  for (std::size_t s = 1; s < shards.size(); ++s) out.merge(shards[s]);
  return out;
}

Vocabulary Vocabulary::from_counts(const WordCounts& counts, std::int64_t min_count) {
  if (min_count < 1) throw std::invalid_argument("min_count must be >= 1");
  if (counts.total_tokens == 0 || counts.counts.empty()) {
    throw std::invalid_argument("empty corpus");
  }
  Vocabulary v;
  for (const auto& [word, n] : counts.counts) {
    if (n >= min_count) v.entries_.push_back({word, n});
  }
  std::sort(v.entries_.begin(), v.entries_.end(), [](const Entry& a, const Entry& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.word < b.word;
  });
  v.total_tokens_ = counts.total_tokens;
  v.reindex();
  return v;
}

Vocabulary Vocabulary::from_entries(std::vector<Entry> entries, std::int64_t total_tokens) {
  Vocabulary v;
  v.entries_ = std::move(entries);
  v.total_tokens_ = total_tokens;
  v.reindex();
  return v;
}

void Vocabulary::reindex() {
  index_.clear();
  index_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!index_.emplace(entries_[i].word, static_cast<WordId>(i)).second) {
      throw DataError("duplicate vocabulary entry: " + entries_[i].word);
    }
  }
}

WordId Vocabulary::id(std::string_view word) const {
  // Heterogeneous lookup is C++20 but needs a transparent hash; a temporary
  // string keeps this simple.
  const auto it = index_.find(std::string(word));
  return it == index_.end() ? -1 : it->second;
}

void Vocabulary::save(std::ostream& out) const {
  for (const auto& e : entries_) out << e.word << '\t' << e.count << '\n';
}

Vocabulary Vocabulary::load(std::istream& in) {
  std::vector<Entry> entries;
  std::string line;
  std::int64_t total = 0;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError("vocabulary line " + std::to_string(lineno) + ": expected word<TAB>count");
    }
    Entry e{line.substr(0, tab), 0};
    try {
      e.count = std::stoll(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw DataError("vocabulary line " + std::to_string(lineno) + ": bad count");
    }
    total += e.count;
    entries.push_back(std::move(e));
  }
  return from_entries(std::move(entries), total);
}

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& lines,
                            std::int64_t min_count, int workers) {
  return Vocabulary::from_counts(count_words_parallel(lines, workers), min_count);
}

double subsample_keep_probability(std::int64_t count, std::int64_t total, double t) {
  const double f = static_cast<double>(count) / static_cast<double>(total);
  const double ratio = t / f;
  return std::min(1.0, std::sqrt(ratio) + ratio);
}

int draw_window(Rng& rng, int window) {
  std::uniform_int_distribution<int> dist(1, window);
  return dist(rng);
}

void generate_pairs(const std::vector<WordId>& sentence, int window, Rng& rng,
                    std::vector<TrainingPair>& out) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  const auto n = static_cast<std::ptrdiff_t>(sentence.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t b = draw_window(rng, window);
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - b);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + b);
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      if (j != i) out.push_back({sentence[static_cast<std::size_t>(i)], sentence[static_cast<std::size_t>(j)]});
    }
  }
}

std::vector<TrainingPair> generate_pairs(const std::vector<WordId>& sentence, int window,
                                         Rng& rng) {
  std::vector<TrainingPair> out;
  generate_pairs(sentence, window, rng, out);
  return out;
}

std::vector<std::vector<std::string>> read_corpus(std::istream& in) {
  std::vector<std::vector<std::string>> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(preprocess_line(line));
  return lines;
}

std::vector<std::vector<std::string>> read_corpus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus: " + path);
  return read_corpus(in);
}

std::vector<std::vector<WordId>> encode_corpus(const std::vector<std::vector<std::string>>& lines,
                                               const Vocabulary& vocab) {
  std::vector<std::vector<WordId>> out;
  out.reserve(lines.size());
  for (const auto& line : lines) {
    std::vector<WordId> ids;
    ids.reserve(line.size());
    for (const auto& tok : line) {
      const WordId id = vocab.id(tok);
      if (id >= 0) ids.push_back(id);
    }
    out.push_back(std::move(ids));
  }
  return out;
}

}  // namespace subword

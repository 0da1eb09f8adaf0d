#include "subword/bpe.h"

#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

#include "subword/error.h"
#include "subword/text.h"

namespace subword {

namespace {

std::string rule_key(std::string_view left, std::string_view right) {
  std::string key;
  key.reserve(left.size() + right.size() + 1);
  key.append(left);
  key.push_back(' ');
  key.append(right);
  return key;
}

// Merges every non-overlapping occurrence of (left, right), scanning left
// to right.
std::vector<std::string> merge_pair(const std::vector<std::string>& symbols,
                                    const std::string& left, const std::string& right) {
  std::vector<std::string> out;
  out.reserve(symbols.size());
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (i + 1 < symbols.size() && symbols[i] == left && symbols[i + 1] == right) {
      out.push_back(left + right);
      ++i;
    } else {
      out.push_back(symbols[i]);
    }
  }
  return out;
}

using Pair = std::pair<std::string, std::string>;

class PairStatistics {
 public:
  void add(const Pair& p, std::int64_t delta, std::size_t word) {
    auto [it, inserted] = counts_.try_emplace(p, 0);
    if (!inserted) queue_.erase({-it->second, p});
    it->second += delta;
    if (it->second > 0) {
      queue_.insert({-it->second, p});
    } else {
      counts_.erase(it);
    }
    if (delta > 0) {
      where_[p].insert(word);
    }
  }

  void forget(const Pair& p, std::size_t word) {
    auto it = where_.find(p);
    if (it == where_.end()) return;
    it->second.erase(word);
    if (it->second.empty()) where_.erase(it);
  }

  bool empty() const { return queue_.empty(); }
  std::int64_t best_count() const { return -queue_.begin()->first; }
  const Pair& best() const { return queue_.begin()->second; }

  std::vector<std::size_t> words_with(const Pair& p) const {
    auto it = where_.find(p);
    if (it == where_.end()) return {};
    return {it->second.begin(), it->second.end()};
  }

 private:
  std::map<Pair, std::int64_t> counts_;
  // Ordered by descending count, then ascending (left, right).
  std::set<std::pair<std::int64_t, Pair>> queue_;
  std::map<Pair, std::set<std::size_t>> where_;
};

}  // namespace

MergeTable::MergeTable(std::vector<MergeRule> rules) : rules_(std::move(rules)) {
  ranks_.reserve(rules_.size());
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const auto& r = rules_[i];
    if (r.left.empty() || r.right.empty()) {
      throw DataError("merge " + std::to_string(i) + ": empty symbol");
    }
    if (!ranks_.emplace(rule_key(r.left, r.right), static_cast<std::int64_t>(i)).second) {
      throw DataError("duplicate merge rule: " + r.left + " " + r.right);
    }
  }
}

std::int64_t MergeTable::rank(std::string_view left, std::string_view right) const {
  const auto it = ranks_.find(rule_key(left, right));
  return it == ranks_.end() ? -1 : it->second;
}

void MergeTable::save(std::ostream& out) const {
  for (const auto& r : rules_) out << r.left << ' ' << r.right << '\n';
}

MergeTable MergeTable::load(std::istream& in) {
  std::vector<MergeRule> rules;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto fields = split_whitespace(line);
    if (fields.empty()) continue;
    if (fields.size() != 2) {
      throw DataError("merge table line " + std::to_string(lineno) + ": expected 'left right'");
    }
    rules.push_back({std::string(fields[0]), std::string(fields[1])});
  }
  return MergeTable(std::move(rules));
}

MergeTable MergeTable::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open merge table: " + path);
  return load(in);
}

std::vector<std::string> bpe_symbols(std::string_view word) {
  auto symbols = utf8_chars(word);
  if (!symbols.empty()) symbols.back().append(kEndOfWord);
  return symbols;
}

MergeTable train_bpe(const std::vector<std::pair<std::string, std::int64_t>>& word_counts,
                     std::size_t n_merges) {
  if (word_counts.empty()) throw std::invalid_argument("train_bpe: empty corpus");
  if (n_merges < 1) throw std::invalid_argument("train_bpe: n_merges must be >= 1");

  std::vector<std::vector<std::string>> words;
  std::vector<std::int64_t> weights;
  words.reserve(word_counts.size());
  for (const auto& [word, count] : word_counts) {
    if (word.empty() || count <= 0) continue;
    words.push_back(bpe_symbols(word));
    weights.push_back(count);
  }
  if (words.empty()) throw std::invalid_argument("train_bpe: empty corpus");

  PairStatistics stats;
  for (std::size_t w = 0; w < words.size(); ++w) {
    const auto& s = words[w];
    for (std::size_t i = 0; i + 1 < s.size(); ++i) stats.add({s[i], s[i + 1]}, weights[w], w);
  }

  std::vector<MergeRule> rules;
  while (rules.size() < n_merges && !stats.empty() && stats.best_count() >= 2) {
    const Pair best = stats.best();
    for (std::size_t w : stats.words_with(best)) {
      const auto& old = words[w];
      for (std::size_t i = 0; i + 1 < old.size(); ++i) {
        const Pair p{old[i], old[i + 1]};
        stats.add(p, -weights[w], w);
        stats.forget(p, w);
      }
      words[w] = merge_pair(old, best.first, best.second);
      const auto& now = words[w];
      for (std::size_t i = 0; i + 1 < now.size(); ++i) {
        stats.add({now[i], now[i + 1]}, weights[w], w);
      }
    }
    rules.push_back({best.first, best.second});
  }
  return MergeTable(std::move(rules));
}

std::vector<std::string> apply_bpe(std::string_view word, const MergeTable& merges) {
  std::vector<std::string> symbols = bpe_symbols(word);
  if (!merges.empty()) {
    while (symbols.size() > 1) {
      std::int64_t best_rank = std::numeric_limits<std::int64_t>::max();
      std::size_t best_at = symbols.size();
      for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
        const std::int64_t r = merges.rank(symbols[i], symbols[i + 1]);
        if (r >= 0 && r < best_rank) {
          best_rank = r;
          best_at = i;
        }
      }
      if (best_at == symbols.size()) break;
      const std::string left = symbols[best_at];
      const std::string right = symbols[best_at + 1];
      symbols = merge_pair(symbols, left, right);
    }
  }
  if (!symbols.empty()) {
    std::string& last = symbols.back();
    if (last.size() >= kEndOfWord.size() &&
        std::string_view(last).substr(last.size() - kEndOfWord.size()) == kEndOfWord) {
      last.resize(last.size() - kEndOfWord.size());
    }
    if (last.empty()) symbols.pop_back();
  }
  return symbols;
}

}  // namespace subword

#include "fixtures.h"

#include <array>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string_view>

#include "subword/pipeline.h"

namespace subword::testing {

namespace {

constexpr std::array<std::string_view, 9> kPrefixes = {"dis", "non", "over", "pre", "mis",
                                                       "un",  "re",  "in",   "im"};
constexpr std::array<std::string_view, 15> kSuffixes = {
    "ness", "ment", "tion", "less", "able", "ful", "ity", "ing",
    "est",  "ly",   "ed",   "es",   "er",   "al",  "s"};

bool starts_with(std::string_view w, std::string_view p) { return w.substr(0, p.size()) == p; }
bool ends_with(std::string_view w, std::string_view s) {
  return w.size() >= s.size() && w.substr(w.size() - s.size()) == s;
}

std::string_view strip_suffix(std::string_view w, std::string_view& suffix) {
  for (auto s : kSuffixes) {
    if (ends_with(w, s) && w.size() >= s.size() + 3) {
      suffix = s;
      return w.substr(0, w.size() - s.size());
    }
  }
  suffix = {};
  return w;
}

}  // namespace

SegmentationLexicon affix_lexicon_tagged(const std::vector<std::string>& words) {
  SegmentationLexicon lex;
  for (const auto& word : words) {
    std::string_view rest = word;
    std::vector<std::string> subs, tags;
    for (auto p : kPrefixes) {
      if (starts_with(rest, p) && rest.size() >= p.size() + 3) {
        subs.emplace_back(p);
        tags.emplace_back("prefix");
        rest.remove_prefix(p.size());
        break;
      }
    }
    std::string_view suffix;
    const std::string_view root = strip_suffix(rest, suffix);
    subs.emplace_back(root);
    tags.emplace_back("root");
    if (!suffix.empty()) {
      subs.emplace_back(suffix);
      tags.emplace_back("suffix");
    }
    lex.add(word, std::move(subs), std::move(tags));
  }
  return lex;
}

SegmentationLexicon affix_lexicon_untagged(const std::vector<std::string>& words) {
  SegmentationLexicon lex;
  for (const auto& word : words) {
    std::string_view suffix;
    const std::string_view stem = strip_suffix(word, suffix);
    std::vector<std::string> subs{std::string(stem)};
    if (!suffix.empty()) subs.emplace_back(suffix);
    lex.add(word, std::move(subs));
  }
  return lex;
}

std::vector<std::string> vocabulary_words(const Vocabulary& vocab) {
  std::vector<std::string> out;
  for (const auto& e : vocab.entries()) out.push_back(e.word);
  return out;
}

std::string data_dir() { return SUBWORD_DATA_DIR; }

std::vector<std::vector<std::string>> sample_corpus() {
  return read_corpus_file(data_dir() + "/sotu_100k.txt");
}

std::vector<std::vector<std::string>> sample_prefix(std::int64_t tokens) {
  std::vector<std::vector<std::string>> out;
  std::int64_t n = 0;
  for (auto& line : sample_corpus()) {
    if (n >= tokens) break;
    n += static_cast<std::int64_t>(line.size());
    out.push_back(std::move(line));
  }
  return out;
}

std::vector<std::vector<std::string>> toy_corpus(int n, int vocab, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> weights;
  for (int i = 0; i < vocab; ++i) weights.push_back(1.0 / (1.0 + i));
  std::discrete_distribution<int> unigram(weights.begin(), weights.end());
  std::uniform_int_distribution<int> len(4, 10);
  std::bernoulli_distribution follow(0.6);
  std::vector<std::vector<std::string>> out;
  for (int s = 0; s < n; ++s) {
    std::vector<std::string> sent;
    int prev = unigram(rng);
    const int L = len(rng);
    for (int i = 0; i < L; ++i) {
      // words tend to be followed by their successor id
      const int w = follow(rng) ? (prev + 1) % vocab : unigram(rng);
      sent.push_back("w" + std::to_string(w));
      prev = w;
    }
    out.push_back(std::move(sent));
  }
  return out;
}

std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "subword_tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

SubwordIndex index_for(const PipelineConfig& config, const Vocabulary& vocab,
                       std::size_t bpe_merges) {
  switch (config.segmenter) {
    case SegmenterKind::kSupervised:
      return SubwordIndex(config, Segmenter::external(config.segmenter,
                                                      affix_lexicon_tagged(vocabulary_words(vocab))));
    case SegmenterKind::kUnsupervised:
      return SubwordIndex(config, Segmenter::external(
                                      config.segmenter, affix_lexicon_untagged(vocabulary_words(vocab))));
    default:
      return SubwordIndex(config,
                          build_segmenter(config, SegmenterResources{"", "", bpe_merges}, vocab));
  }
}

}  // namespace subword::testing

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "subword/bpe.h"
#include "subword/config.h"
#include "subword/corpus.h"

namespace subword {

inline constexpr std::string_view kRootTag = "root";
inline constexpr std::string_view kWordTag = "word";

// delta(w) before any configuration flags are applied.
struct RawSegmentation {
  std::vector<std::string> subwords;
  std::optional<std::vector<std::string>> tags;

  friend bool operator==(const RawSegmentation&, const RawSegmentation&) = default;
};

// Output of an external segmenter, keyed by word. File format:
// `word<TAB>sub1 sub2 ...[<TAB>tag1 tag2 ...]`. Either every entry carries
// tags or none does.
class SegmentationLexicon {
 public:
  void add(std::string word, std::vector<std::string> subwords,
           std::optional<std::vector<std::string>> tags = std::nullopt);

  const RawSegmentation* find(std::string_view word) const;
  bool has_tags() const { return has_tags_; }
  std::size_t size() const { return entries_.size(); }
  // Distinct tags in first-seen order.
  const std::vector<std::string>& tag_inventory() const { return tag_inventory_; }

  void save(std::ostream& out) const;
  static SegmentationLexicon load(std::istream& in);
  static SegmentationLexicon load_file(const std::string& path);

 private:
  std::unordered_map<std::string, RawSegmentation> entries_;
  std::vector<std::string> order_;
  std::vector<std::string> tag_inventory_;
  bool has_tags_ = false;
};

// Exact lookup; a miss falls back to the whole word (tagged `root` when the
// lexicon carries tags).
RawSegmentation segment_external(std::string_view word, const SegmentationLexicon& lexicon);

// All n-grams of "<word>" with n in [n_min, n_max], grouped by increasing n
// and left to right within each n. Duplicates are kept.
std::vector<std::string> segment_char_ngrams(std::string_view word, int n_min, int n_max);

// Bucketed key for a hashed character n-gram.
std::string ngram_bucket_key(std::string_view ngram, std::uint32_t buckets);

// delta(w) for any segmenter kind. Immutable after construction.
class Segmenter {
 public:
  static Segmenter whole_word();
  static Segmenter bpe(MergeTable merges);
  static Segmenter char_ngrams(int n_min, int n_max, std::uint32_t buckets = 0);
  static Segmenter external(SegmenterKind kind, SegmentationLexicon lexicon);

  SegmenterKind kind() const { return kind_; }
  RawSegmentation segment(std::string_view word) const;

  const MergeTable& merges() const { return merges_; }
  const SegmentationLexicon& lexicon() const { return lexicon_; }
  int ngram_min() const { return ngram_min_; }
  int ngram_max() const { return ngram_max_; }
  std::uint32_t ngram_buckets() const { return ngram_buckets_; }

 private:
  SegmenterKind kind_ = SegmenterKind::kWholeWord;
  MergeTable merges_;
  SegmentationLexicon lexicon_;
  int ngram_min_ = 3;
  int ngram_max_ = 6;
  std::uint32_t ngram_buckets_ = 0;
};

// Interns string keys (subwords, `subword:tag`, tags) as dense ids.
class KeyTable {
 public:
  std::int32_t find(std::string_view key) const;  // -1 when absent
  std::int32_t intern(const std::string& key);
  const std::string& key(std::int32_t id) const { return keys_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return keys_.size(); }
  const std::vector<std::string>& keys() const { return keys_; }

  // `key<TAB>id` per line.
  void save(std::ostream& out) const;
  static KeyTable from_keys(std::vector<std::string> keys);

 private:
  std::vector<std::string> keys_;
  std::unordered_map<std::string, std::int32_t> index_;
};

struct SubwordSequence {
  std::vector<std::int32_t> units;
  std::optional<std::vector<std::int32_t>> tags;
  std::vector<std::int32_t> positions;
  bool includes_word_token = false;
};

enum class AssembleMode {
  kGrow,    // training: unseen keys are added to the subword table
  kLookup,  // inference: unseen units are dropped
};

// Applies the word-token, tag and position flags of `config` to a raw
// segmentation. Tags are required for st and for sms configurations with
// position embeddings (tags act as positions there).
SubwordSequence assemble_sequence(std::string_view word, const RawSegmentation& raw,
                                  const PipelineConfig& config, KeyTable& subwords,
                                  const KeyTable& tags, AssembleMode mode);
// Lookup-only form over a read-only subword table.
SubwordSequence assemble_sequence(std::string_view word, const RawSegmentation& raw,
                                  const PipelineConfig& config, const KeyTable& subwords,
                                  const KeyTable& tags);

// Segmenter plus the key tables of one trained configuration.
class SubwordIndex {
 public:
  SubwordIndex(PipelineConfig config, Segmenter segmenter);
  SubwordIndex(PipelineConfig config, Segmenter segmenter, KeyTable subwords, KeyTable tags);

  // Segments every vocabulary word (growing the subword table); the result
  // is indexed by word id.
  std::vector<SubwordSequence> build(const Vocabulary& vocab);

  // Inference-mode sequence for any word, unknown units dropped.
  SubwordSequence lookup(std::string_view word) const;

  // Rows of the position table this configuration needs.
  std::size_t position_rows() const;

  const PipelineConfig& config() const { return config_; }
  const Segmenter& segmenter() const { return segmenter_; }
  const KeyTable& subwords() const { return subwords_; }
  const KeyTable& tags() const { return tags_; }

 private:
  PipelineConfig config_;
  Segmenter segmenter_;
  KeyTable subwords_;
  KeyTable tags_;
};

}  // namespace subword

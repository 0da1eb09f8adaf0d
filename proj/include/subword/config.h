#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace subword {

enum class SegmenterKind { kSupervised, kUnsupervised, kBpe, kCharNgram, kWholeWord };
enum class WordToken { kExclude, kInclude };
enum class TagMode { kOff, kConcat };
enum class PositionMode { kNone, kAdditive, kMultiplicative };
enum class Composition { kAdd, kAttention, kMultiHead };

// One point of the configuration space plus the model shape.
struct PipelineConfig {
  SegmenterKind segmenter = SegmenterKind::kBpe;
  WordToken word_token = WordToken::kInclude;
  TagMode tag_mode = TagMode::kOff;
  PositionMode position_mode = PositionMode::kNone;
  Composition composition = Composition::kAdd;

  int heads = 4;              // mtx only
  int attention_hidden = 64;  // h
  int dim = 300;              // d
  int position_cap = 20;      // p for absolute positions
  bool add_mean = false;      // divide the `add` sum by n

  int ngram_min = 3;
  int ngram_max = 6;
  std::uint32_t ngram_buckets = 0;  // 0 disables hashing

  // Heads actually used by the attention layer (1 for att).
  int attention_heads() const { return composition == Composition::kMultiHead ? heads : 1; }
  bool uses_attention() const { return composition != Composition::kAdd; }
  bool uses_positions() const { return position_mode != PositionMode::kNone; }

  // Throws std::invalid_argument on a combination outside the model space.
  void validate() const;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

// Strict parser for the 60 labels of the configuration table, e.g.
// "sms.ww.pp.add" or "sms.w-.st.att".
PipelineConfig parse_config_label(std::string_view label);

// Also accepts the baseline segmenters `word` (subword-agnostic SGNS) and
// `ngram` (fastText-style character n-grams), e.g. "word.w-.p-.add".
PipelineConfig parse_run_label(std::string_view label);

// segmentation.wordtoken.(st|position).composition
std::string format_config_label(const PipelineConfig& config);

// All 60 labels in a fixed order (24 sms, 18 morf, 18 bpe).
std::vector<std::string> all_config_labels();

std::string_view segmenter_name(SegmenterKind kind);
SegmenterKind parse_segmenter(std::string_view name);
WordToken parse_word_token(std::string_view name);
TagMode parse_tag_mode(std::string_view name);
PositionMode parse_position_mode(std::string_view name);
Composition parse_composition(std::string_view name);

}  // namespace subword

#include "subword/segmentation.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "subword/error.h"
#include "subword/text.h"

namespace subword {

namespace {

std::vector<std::string> split_spaces(std::string_view s) {
  std::vector<std::string> out;
  for (auto piece : split_whitespace(s)) out.emplace_back(piece);
  return out;
}

std::string join_spaces(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(' ');
    out += parts[i];
  }
  return out;
}

}  // namespace

void SegmentationLexicon::add(std::string word, std::vector<std::string> subwords,
                              std::optional<std::vector<std::string>> tags) {
  if (subwords.empty()) throw DataError("lexicon entry '" + word + "' has no subwords");
  if (tags && tags->size() != subwords.size()) {
    throw DataError("lexicon entry '" + word + "': " + std::to_string(tags->size()) +
                    " tags for " + std::to_string(subwords.size()) + " subwords");
  }
  if (!entries_.empty() && tags.has_value() != has_tags_) {
    throw DataError("lexicon entry '" + word + "': tag column must be present on all entries or none");
  }
  has_tags_ = tags.has_value();
  if (tags) {
    for (const auto& t : *tags) {
      if (std::find(tag_inventory_.begin(), tag_inventory_.end(), t) == tag_inventory_.end()) {
        tag_inventory_.push_back(t);
      }
    }
  }
  auto [it, inserted] = entries_.try_emplace(word);
  if (inserted) order_.push_back(word);
  it->second = RawSegmentation{std::move(subwords), std::move(tags)};
}

const RawSegmentation* SegmentationLexicon::find(std::string_view word) const {
  const auto it = entries_.find(std::string(word));
  return it == entries_.end() ? nullptr : &it->second;
}

void SegmentationLexicon::save(std::ostream& out) const {
  for (const auto& word : order_) {
    const auto& e = entries_.at(word);
    out << word << '\t' << join_spaces(e.subwords);
    if (e.tags) out << '\t' << join_spaces(*e.tags);
    out << '\n';
  }
}

SegmentationLexicon SegmentationLexicon::load(std::istream& in) {
  SegmentationLexicon lex;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cols.size() < 2 || cols.size() > 3) {
      throw DataError("lexicon line " + std::to_string(lineno) +
                      ": expected word<TAB>subwords[<TAB>tags]");
    }
    std::optional<std::vector<std::string>> tags;
    if (cols.size() == 3) tags = split_spaces(cols[2]);
    try {
      lex.add(cols[0], split_spaces(cols[1]), std::move(tags));
    } catch (const DataError& e) {
      throw DataError("lexicon line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return lex;
}

SegmentationLexicon SegmentationLexicon::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon: " + path);
  return load(in);
}

RawSegmentation segment_external(std::string_view word, const SegmentationLexicon& lexicon) {
  if (const RawSegmentation* hit = lexicon.find(word)) return *hit;
  RawSegmentation raw{{std::string(word)}, std::nullopt};
  if (lexicon.has_tags()) raw.tags = std::vector<std::string>{std::string(kRootTag)};
  return raw;
}

std::vector<std::string> segment_char_ngrams(std::string_view word, int n_min, int n_max) {
  if (n_min < 1 || n_max < n_min) throw std::invalid_argument("need 1 <= n_min <= n_max");
  std::vector<std::string> chars = utf8_chars(word);
  chars.insert(chars.begin(), "<");
  chars.push_back(">");
  const auto len = static_cast<int>(chars.size());
  std::vector<std::string> out;
  for (int n = n_min; n <= n_max; ++n) {
    for (int i = 0; i + n <= len; ++i) {
      std::string gram;
      for (int k = i; k < i + n; ++k) gram += chars[static_cast<std::size_t>(k)];
      out.push_back(std::move(gram));
    }
  }
  return out;
}

std::string ngram_bucket_key(std::string_view ngram, std::uint32_t buckets) {
  // Digits never survive preprocessing, so this key cannot collide with a
  // corpus word.
  return "ngram#" + std::to_string(fnv1a(ngram) % buckets);
}

Segmenter Segmenter::whole_word() { return Segmenter{}; }

Segmenter Segmenter::bpe(MergeTable merges) {
  Segmenter s;
  s.kind_ = SegmenterKind::kBpe;
  s.merges_ = std::move(merges);
  return s;
}

Segmenter Segmenter::char_ngrams(int n_min, int n_max, std::uint32_t buckets) {
  if (n_min < 1 || n_max < n_min) throw std::invalid_argument("need 1 <= n_min <= n_max");
  Segmenter s;
  s.kind_ = SegmenterKind::kCharNgram;
  s.ngram_min_ = n_min;
  s.ngram_max_ = n_max;
  s.ngram_buckets_ = buckets;
  return s;
}

Segmenter Segmenter::external(SegmenterKind kind, SegmentationLexicon lexicon) {
  if (kind != SegmenterKind::kSupervised && kind != SegmenterKind::kUnsupervised) {
    throw std::invalid_argument("external segmenter must be sms or morf");
  }
  Segmenter s;
  s.kind_ = kind;
  s.lexicon_ = std::move(lexicon);
  return s;
}

RawSegmentation Segmenter::segment(std::string_view word) const {
  switch (kind_) {
    case SegmenterKind::kWholeWord:
      return {{std::string(word)}, std::nullopt};
    case SegmenterKind::kBpe:
      return {apply_bpe(word, merges_), std::nullopt};
    case SegmenterKind::kCharNgram: {
      auto grams = segment_char_ngrams(word, ngram_min_, ngram_max_);
      if (ngram_buckets_ > 0) {
        for (auto& g : grams) g = ngram_bucket_key(g, ngram_buckets_);
      }
      return {std::move(grams), std::nullopt};
    }
    case SegmenterKind::kSupervised:
    case SegmenterKind::kUnsupervised:
      return segment_external(word, lexicon_);
  }
  return {};
}

std::int32_t KeyTable::find(std::string_view key) const {
  const auto it = index_.find(std::string(key));
  return it == index_.end() ? -1 : it->second;
}

std::int32_t KeyTable::intern(const std::string& key) {
  const auto [it, inserted] = index_.try_emplace(key, static_cast<std::int32_t>(keys_.size()));
  if (inserted) keys_.push_back(key);
  return it->second;
}

void KeyTable::save(std::ostream& out) const {
  for (std::size_t i = 0; i < keys_.size(); ++i) out << keys_[i] << '\t' << i << '\n';
}

KeyTable KeyTable::from_keys(std::vector<std::string> keys) {
  KeyTable t;
  for (auto& k : keys) {
    if (t.find(k) >= 0) throw DataError("duplicate key: " + k);
    t.intern(k);
  }
  return t;
}

namespace {

template <typename Resolve>
SubwordSequence assemble_impl(std::string_view word, const RawSegmentation& raw,
                              const PipelineConfig& config, const KeyTable& tags,
                              Resolve&& resolve) {
  const bool concat_tags = config.tag_mode == TagMode::kConcat;
  const bool tags_as_positions =
      config.segmenter == SegmenterKind::kSupervised && config.uses_positions();
  const bool have_tags = raw.tags.has_value();
  if ((concat_tags || tags_as_positions) && !have_tags) {
    throw DataError("tagged mode requested but segmentation of '" + std::string(word) +
                    "' has no tags");
  }
  if (raw.subwords.empty()) throw DataError("empty segmentation for '" + std::string(word) + "'");

  std::vector<std::string> surfaces = raw.subwords;
  std::vector<std::string> unit_tags;
  if (have_tags) unit_tags = *raw.tags;
  const bool add_word = config.word_token == WordToken::kInclude && raw.subwords.size() > 1;
  if (add_word) {
    surfaces.emplace_back(word);
    if (have_tags) unit_tags.emplace_back(kWordTag);
  }

  SubwordSequence seq;
  const bool keep_tag_ids = have_tags && tags.size() > 0;
  if (keep_tag_ids) seq.tags.emplace();
  for (std::size_t i = 0; i < surfaces.size(); ++i) {
    const std::string key = concat_tags ? surfaces[i] + ":" + unit_tags[i] : surfaces[i];
    const std::int32_t id = resolve(key);
    if (id < 0) continue;

    std::int32_t tag_id = -1;
    if (keep_tag_ids) {
      tag_id = tags.find(unit_tags[i]);
      if (tag_id < 0) throw DataError("unknown tag '" + unit_tags[i] + "'");
    }
    std::int32_t position;
    if (tags_as_positions) {
      position = tag_id;
    } else {
      position = static_cast<std::int32_t>(std::min<std::size_t>(
          i, static_cast<std::size_t>(config.position_cap - 1)));
    }
    seq.units.push_back(id);
    seq.positions.push_back(position);
    if (keep_tag_ids) seq.tags->push_back(tag_id);
    if (add_word && i + 1 == surfaces.size()) seq.includes_word_token = true;
  }
  return seq;
}

}  // namespace

SubwordSequence assemble_sequence(std::string_view word, const RawSegmentation& raw,
                                  const PipelineConfig& config, KeyTable& subwords,
                                  const KeyTable& tags, AssembleMode mode) {
  if (mode == AssembleMode::kGrow) {
    return assemble_impl(word, raw, config, tags,
                         [&](const std::string& key) { return subwords.intern(key); });
  }
  return assemble_sequence(word, raw, config, static_cast<const KeyTable&>(subwords), tags);
}

SubwordSequence assemble_sequence(std::string_view word, const RawSegmentation& raw,
                                  const PipelineConfig& config, const KeyTable& subwords,
                                  const KeyTable& tags) {
  return assemble_impl(word, raw, config, tags,
                       [&](const std::string& key) { return subwords.find(key); });
}

SubwordIndex::SubwordIndex(PipelineConfig config, Segmenter segmenter)
    : config_(std::move(config)), segmenter_(std::move(segmenter)) {
  config_.validate();
  if (config_.segmenter != segmenter_.kind()) {
    throw std::invalid_argument("segmenter kind does not match configuration " +
                                format_config_label(config_));
  }
  if (segmenter_.kind() == SegmenterKind::kSupervised && segmenter_.lexicon().has_tags()) {
    for (const auto& t : segmenter_.lexicon().tag_inventory()) tags_.intern(t);
    tags_.intern(std::string(kRootTag));
    tags_.intern(std::string(kWordTag));
  }
}

SubwordIndex::SubwordIndex(PipelineConfig config, Segmenter segmenter, KeyTable subwords,
                           KeyTable tags)
    : config_(std::move(config)),
      segmenter_(std::move(segmenter)),
      subwords_(std::move(subwords)),
      tags_(std::move(tags)) {
  config_.validate();
}

std::vector<SubwordSequence> SubwordIndex::build(const Vocabulary& vocab) {
  std::vector<SubwordSequence> out;
  out.reserve(vocab.size());
  for (const auto& e : vocab.entries()) {
    out.push_back(assemble_sequence(e.word, segmenter_.segment(e.word), config_, subwords_,
                                    tags_, AssembleMode::kGrow));
  }
  return out;
}

SubwordSequence SubwordIndex::lookup(std::string_view word) const {
  return assemble_sequence(word, segmenter_.segment(word), config_, subwords_, tags_);
}

std::size_t SubwordIndex::position_rows() const {
  if (!config_.uses_positions()) return 0;
  if (config_.segmenter == SegmenterKind::kSupervised) return tags_.size();
  return static_cast<std::size_t>(config_.position_cap);
}

}  // namespace subword

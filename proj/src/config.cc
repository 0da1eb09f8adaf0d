#include "subword/config.h"

#include <stdexcept>

namespace subword {

namespace {

std::string_view word_token_name(WordToken w) { return w == WordToken::kInclude ? "ww" : "w-"; }

std::string_view position_name(PositionMode p) {
  switch (p) {
    case PositionMode::kNone: return "p-";
    case PositionMode::kAdditive: return "pp";
    case PositionMode::kMultiplicative: return "mp";
  }
  return "?";
}

std::string_view composition_name(Composition c) {
  switch (c) {
    case Composition::kAdd: return "add";
    case Composition::kAttention: return "att";
    case Composition::kMultiHead: return "mtx";
  }
  return "?";
}

std::vector<std::string_view> split_dots(std::string_view label) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto dot = label.find('.', start);
    parts.push_back(label.substr(start, dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return parts;
}

PipelineConfig parse_label(std::string_view label, bool allow_baselines) {
  const auto parts = split_dots(label);
  const std::string quoted = "'" + std::string(label) + "'";
  const auto has = [&](std::string_view tok) {
    for (auto p : parts) if (p == tok) return true;
    return false;
  };
  if (parts.size() == 5 && has("st") && (has("pp") || has("mp") || has("p-"))) {
    throw std::invalid_argument("label " + quoted +
                                ": st and position embeddings are mutually exclusive");
  }
  if (parts.size() != 4) {
    throw std::invalid_argument("label " + quoted +
                                ": expected segmentation.wordtoken.(st|position).composition");
  }
  PipelineConfig config;
  config.segmenter = parse_segmenter(parts[0]);
  const bool baseline = config.segmenter == SegmenterKind::kCharNgram ||
                        config.segmenter == SegmenterKind::kWholeWord;
  if (baseline && !allow_baselines) {
    throw std::invalid_argument("label " + quoted + ": segmenter '" + std::string(parts[0]) +
                                "' is a baseline, not a table configuration");
  }
  config.word_token = parse_word_token(parts[1]);
  if (parts[2] == "st") {
    config.tag_mode = TagMode::kConcat;
    config.position_mode = PositionMode::kNone;
  } else {
    config.position_mode = parse_position_mode(parts[2]);
  }
  config.composition = parse_composition(parts[3]);
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("label " + quoted + ": " + e.what());
  }
  return config;
}

}  // namespace

void PipelineConfig::validate() const {
  if (tag_mode == TagMode::kConcat && segmenter != SegmenterKind::kSupervised) {
    throw std::invalid_argument("st requires the supervised segmenter (sms)");
  }
  if (tag_mode == TagMode::kConcat && position_mode != PositionMode::kNone) {
    throw std::invalid_argument("st and position embeddings are mutually exclusive");
  }
  if (dim < 1) throw std::invalid_argument("dim must be positive");
  if (position_cap < 1) throw std::invalid_argument("position_cap must be positive");
  if (uses_attention() && attention_hidden < 1) {
    throw std::invalid_argument("attention_hidden must be positive");
  }
  if (composition == Composition::kMultiHead && heads < 1) {
    throw std::invalid_argument("heads must be positive");
  }
  if (ngram_min < 1 || ngram_max < ngram_min) {
    throw std::invalid_argument("need 1 <= ngram_min <= ngram_max");
  }
}

std::string_view segmenter_name(SegmenterKind kind) {
  switch (kind) {
    case SegmenterKind::kSupervised: return "sms";
    case SegmenterKind::kUnsupervised: return "morf";
    case SegmenterKind::kBpe: return "bpe";
    case SegmenterKind::kCharNgram: return "ngram";
    case SegmenterKind::kWholeWord: return "word";
  }
  return "?";
}

SegmenterKind parse_segmenter(std::string_view name) {
  if (name == "sms") return SegmenterKind::kSupervised;
  if (name == "morf") return SegmenterKind::kUnsupervised;
  if (name == "bpe") return SegmenterKind::kBpe;
  if (name == "ngram") return SegmenterKind::kCharNgram;
  if (name == "word") return SegmenterKind::kWholeWord;
  throw std::invalid_argument("unknown segmentation '" + std::string(name) + "'");
}

WordToken parse_word_token(std::string_view name) {
  if (name == "ww") return WordToken::kInclude;
  if (name == "w-") return WordToken::kExclude;
  throw std::invalid_argument("unknown word-token option '" + std::string(name) + "'");
}

TagMode parse_tag_mode(std::string_view name) {
  if (name == "st") return TagMode::kConcat;
  if (name == "off") return TagMode::kOff;
  throw std::invalid_argument("unknown tag option '" + std::string(name) + "'");
}

PositionMode parse_position_mode(std::string_view name) {
  if (name == "p-") return PositionMode::kNone;
  if (name == "pp") return PositionMode::kAdditive;
  if (name == "mp") return PositionMode::kMultiplicative;
  throw std::invalid_argument("unknown position option '" + std::string(name) + "'");
}

Composition parse_composition(std::string_view name) {
  if (name == "add") return Composition::kAdd;
  if (name == "att") return Composition::kAttention;
  if (name == "mtx") return Composition::kMultiHead;
  throw std::invalid_argument("unknown composition '" + std::string(name) + "'");
}

PipelineConfig parse_config_label(std::string_view label) { return parse_label(label, false); }

PipelineConfig parse_run_label(std::string_view label) { return parse_label(label, true); }

std::string format_config_label(const PipelineConfig& config) {
  std::string out(segmenter_name(config.segmenter));
  out += '.';
  out += word_token_name(config.word_token);
  out += '.';
  out += config.tag_mode == TagMode::kConcat ? std::string_view("st")
                                               : position_name(config.position_mode);
  out += '.';
  out += composition_name(config.composition);
  return out;
}

std::vector<std::string> all_config_labels() {
  std::vector<std::string> labels;
  for (const char* seg : {"sms", "morf", "bpe"}) {
    for (const char* wt : {"w-", "ww"}) {
      std::vector<std::string> middles = {"p-", "pp", "mp"};
      if (std::string_view(seg) == "sms") middles.push_back("st");
      for (const auto& mid : middles) {
        for (const char* comp : {"add", "att", "mtx"}) {
          labels.push_back(std::string(seg) + "." + wt + "." + mid + "." + comp);
        }
      }
    }
  }
  return labels;
}

}  // namespace subword

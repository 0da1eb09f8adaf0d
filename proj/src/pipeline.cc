#include "subword/pipeline.h"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "subword/error.h"
#include "subword/text.h"
#include "subword/vectors.h"

namespace subword {

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Runs one stage, rethrowing failures with the stage name in front.
template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  const std::string prefix = std::string("stage ") + name + ": ";
  try {
    return f();
  } catch (const NumericError& e) {
    throw NumericError(prefix + e.what());
  } catch (const DataError& e) {
    throw DataError(prefix + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(prefix + e.what());
  }
}

}  // namespace

PipelineConfig RunManifest::resolved_config() const {
  PipelineConfig c = parse_run_label(label);
  c.heads = pipeline.heads;
  c.attention_hidden = pipeline.attention_hidden;
  c.dim = pipeline.dim;
  c.position_cap = pipeline.position_cap;
  c.add_mean = pipeline.add_mean;
  c.ngram_min = pipeline.ngram_min;
  c.ngram_max = pipeline.ngram_max;
  c.ngram_buckets = pipeline.ngram_buckets;
  c.validate();
  return c;
}

std::map<std::string, std::string> RunManifest::to_map() const {
  std::map<std::string, std::string> m;
  m["label"] = label;
  m["dim"] = std::to_string(pipeline.dim);
  m["heads"] = std::to_string(pipeline.heads);
  m["attention-hidden"] = std::to_string(pipeline.attention_hidden);
  m["position-cap"] = std::to_string(pipeline.position_cap);
  m["add-mean"] = pipeline.add_mean ? "true" : "false";
  m["ngram-min"] = std::to_string(pipeline.ngram_min);
  m["ngram-max"] = std::to_string(pipeline.ngram_max);
  m["ngram-buckets"] = std::to_string(pipeline.ngram_buckets);
  m["epochs"] = std::to_string(train.epochs);
  m["window"] = std::to_string(train.window);
  m["negatives"] = std::to_string(train.negatives);
  m["subsample"] = fmt(train.subsample_t);
  m["lr"] = fmt(train.lr0);
  m["batch-size"] = std::to_string(train.batch_size);
  m["seed"] = std::to_string(train.seed);
  m["workers"] = std::to_string(train.workers);
  m["min-count"] = std::to_string(min_count);
  m["bpe-merges"] = std::to_string(bpe_merges);
  m["corpus"] = corpus;
  if (!lexicon.empty()) m["lexicon"] = lexicon;
  if (!merges.empty()) m["merges"] = merges;
  if (!checkpoint_out.empty()) m["checkpoint"] = checkpoint_out;
  if (!vectors_out.empty()) m["vectors"] = vectors_out;
  if (!corpus_checksum.empty()) m["corpus-checksum"] = corpus_checksum;
  m["wall-clock-seconds"] = fmt(wall_clock_seconds);
  return m;
}

void RunManifest::save(std::ostream& out) const {
  for (const auto& [k, v] : to_map()) out << k << '=' << v << '\n';
}

Segmenter build_segmenter(const PipelineConfig& config, const SegmenterResources& res,
                          const Vocabulary& vocab) {
  switch (config.segmenter) {
    case SegmenterKind::kWholeWord:
      return Segmenter::whole_word();
    case SegmenterKind::kCharNgram:
      return Segmenter::char_ngrams(config.ngram_min, config.ngram_max, config.ngram_buckets);
    case SegmenterKind::kBpe: {
      if (!res.merges_path.empty()) return Segmenter::bpe(MergeTable::load_file(res.merges_path));
      std::vector<std::pair<std::string, std::int64_t>> types;
      for (const auto& e : vocab.entries()) types.emplace_back(e.word, e.count);
      return Segmenter::bpe(train_bpe(types, res.bpe_merges));
    }
    case SegmenterKind::kSupervised:
    case SegmenterKind::kUnsupervised: {
      if (res.lexicon_path.empty()) {
        throw DataError(std::string(segmenter_name(config.segmenter)) +
                        " needs a segmentation lexicon file");
      }
      SegmentationLexicon lex = SegmentationLexicon::load_file(res.lexicon_path);
      if (config.segmenter == SegmenterKind::kSupervised && !lex.has_tags() &&
          (config.tag_mode == TagMode::kConcat || config.uses_positions())) {
        throw DataError("lexicon " + res.lexicon_path + " has no tags but " +
                        format_config_label(config) + " needs them");
      }
      return Segmenter::external(config.segmenter, std::move(lex));
    }
  }
  throw std::logic_error("unhandled segmenter kind");
}

std::string file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::uint64_t h = fnv1a("");
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    h = fnv1a(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
  }
  return hex64(h);
}

TrainedModel run_pipeline(RunManifest& manifest, std::ostream* log) {
  const auto start = std::chrono::steady_clock::now();
  const PipelineConfig config = stage("config", [&] { return manifest.resolved_config(); });
  TrainConfig tc = manifest.train;
  if (!manifest.lr_explicit) tc.lr0 = default_learning_rate(config.segmenter);
  manifest.train.lr0 = tc.lr0;
  stage("config", [&] { tc.validate(); });
  const std::string label = format_config_label(config);
  if (log) *log << "run " << label << " seed " << tc.seed << '\n';

  const auto lines = stage("read-corpus", [&] {
    if (manifest.corpus.empty()) throw DataError("no corpus given");
    manifest.corpus_checksum = file_checksum(manifest.corpus);
    return read_corpus_file(manifest.corpus);
  });
  Vocabulary vocab = stage("vocabulary", [&] {
    try {
      return build_vocabulary(lines, manifest.min_count, tc.workers);
    } catch (const std::invalid_argument& e) {
      throw DataError(std::string(e.what()) + " (" + manifest.corpus + ")");
    }
  });
  if (log) {
    *log << label << " vocabulary " << vocab.size() << " words, " << vocab.total_tokens()
         << " tokens\n";
  }
  const auto sentences = encode_corpus(lines, vocab);

  SubwordIndex index = stage("segmenter", [&] {
    SegmenterResources res{manifest.lexicon, manifest.merges, manifest.bpe_merges};
    return SubwordIndex(config, build_segmenter(config, res, vocab));
  });

  TrainedModel model = stage("train", [&] {
    return train_model(sentences, std::move(vocab), std::move(index), tc, log);
  });
  model.metadata["corpus-checksum"] = manifest.corpus_checksum;

  if (!manifest.checkpoint_out.empty()) {
    stage("checkpoint", [&] { save_checkpoint_file(model, manifest.checkpoint_out); });
  }
  if (!manifest.vectors_out.empty()) {
    stage("export", [&] { export_vectors(model).save_file(manifest.vectors_out); });
  }
  manifest.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!manifest.manifest_out.empty()) {
    stage("manifest", [&] {
      std::ofstream out(manifest.manifest_out);
      if (!out) throw DataError("cannot open " + manifest.manifest_out + " for writing");
      manifest.save(out);
    });
  }
  return model;
}

}  // namespace subword

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "subword/checkpoint.h"
#include "subword/config.h"
#include "subword/segmentation.h"
#include "subword/trainer.h"

namespace subword {

// One training run: inputs, configuration, and where artifacts go. Written
// back out as flat key=value text, which `train --config` accepts.
struct RunManifest {
  std::string label = "bpe.ww.p-.add";
  PipelineConfig pipeline;  // shape fields; components come from `label`
  TrainConfig train;
  bool lr_explicit = false;  // otherwise the per-segmenter default applies
  std::int64_t min_count = 5;
  std::size_t bpe_merges = 10000;

  std::string corpus;
  std::string lexicon;  // sms / morf
  std::string merges;   // bpe; learnt from the corpus when empty

  std::string checkpoint_out;
  std::string vectors_out;
  std::string manifest_out;

  // Filled in by run_pipeline.
  std::string corpus_checksum;
  double wall_clock_seconds = 0.0;

  // Label components applied onto `pipeline`.
  PipelineConfig resolved_config() const;
  std::map<std::string, std::string> to_map() const;
  void save(std::ostream& out) const;
};

struct SegmenterResources {
  std::string lexicon_path;
  std::string merges_path;
  std::size_t bpe_merges = 10000;
};

// Builds delta(w) for `config`, learning BPE merges from the vocabulary
// when no merge file is given.
Segmenter build_segmenter(const PipelineConfig& config, const SegmenterResources& res,
                          const Vocabulary& vocab);

std::string file_checksum(const std::string& path);

// read corpus -> vocabulary -> segmenter -> train -> checkpoint -> export ->
// manifest. Errors are rethrown with the stage name prefixed and their type
// kept (DataError, NumericError, std::invalid_argument).
TrainedModel run_pipeline(RunManifest& manifest, std::ostream* log = nullptr);

}  // namespace subword

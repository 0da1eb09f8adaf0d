#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "subword/checkpoint.h"
#include "subword/config.h"
#include "subword/corpus.h"
#include "subword/model.h"
#include "subword/segmentation.h"

namespace subword {

struct TrainConfig {
  int epochs = 5;
  int window = 5;
  int negatives = 5;
  double subsample_t = 1e-5;
  double lr0 = 0.05;
  int batch_size = 1024;
  std::uint64_t seed = 1;
  int workers = 1;

  void validate() const;
};

// Learning rate used unless one is given explicitly: 0.075 for morf, 0.05
// otherwise.
double default_learning_rate(SegmenterKind kind);

struct EpochStats {
  int epoch = 0;  // 1-based
  double mean_loss = 0.0;  // per pair
  std::int64_t pairs = 0;
  double lr = 0.0;  // at the end of the epoch
  double words_per_sec = 0.0;
};

struct TrainResult {
  ModelParameters params;
  std::vector<EpochStats> epochs;
};

// Random stream driving subsampling, windows and negatives; parameter
// initialisation uses Rng(seed) directly.
Rng training_rng(std::uint64_t seed);

// Called after every epoch with the current parameters.
using EpochHook = std::function<void(const EpochStats&, const ModelParameters&)>;

// SGNS over precomputed target sequences (indexed by word id). Throws
// NumericError as soon as a batch loss or the parameters stop being finite.
// With workers = 1 the result is a pure function of the inputs.
TrainResult train(const std::vector<std::vector<WordId>>& sentences, const Vocabulary& vocab,
                  const std::vector<SubwordSequence>& sequences, std::size_t n_subwords,
                  std::size_t n_positions, const PipelineConfig& config, const TrainConfig& tc,
                  std::ostream* log = nullptr, const EpochHook& hook = {});

// Segments the vocabulary, trains, and bundles the result.
TrainedModel train_model(const std::vector<std::vector<WordId>>& sentences, Vocabulary vocab,
                         SubwordIndex index, const TrainConfig& tc, std::ostream* log = nullptr,
                         std::vector<EpochStats>* epochs = nullptr);

}  // namespace subword

#pragma once

#include <cstddef>
#include <vector>

#include "subword/config.h"
#include "subword/corpus.h"
#include "subword/model.h"
#include "subword/segmentation.h"

namespace subword {

// One minibatch: pairs plus `negatives_per_pair` noise ids per pair, laid
// out pair-major.
struct Batch {
  std::vector<TrainingPair> pairs;
  std::vector<WordId> negatives;
  int negatives_per_pair = 0;

  std::size_t size() const { return pairs.size(); }
  void clear() {
    pairs.clear();
    negatives.clear();
  }
};

// Summed SGNS loss and gradients of a batch, written into `out` (which is
// reset first). Consecutive pairs sharing a target are composed once.
// Parameters are read-only.
double batch_gradient_serial(const Batch& batch, const std::vector<SubwordSequence>& sequences,
                             const ModelParameters& params, const PipelineConfig& config,
                             GradientBuffer& out);

// Same contract, split over OpenMP threads with one scratch buffer per
// thread, merged in thread order. Equal to the serial kernel up to
// floating-point reassociation.
double batch_gradient_parallel(const Batch& batch, const std::vector<SubwordSequence>& sequences,
                               const ModelParameters& params, const PipelineConfig& config,
                               int workers, std::vector<GradientBuffer>& scratch,
                               GradientBuffer& out);

// One AdaGrad step on every row touched by `grads` and on the dense
// attention matrices.
void apply_gradients(const GradientBuffer& grads, double lr, ModelParameters& params);

}  // namespace subword

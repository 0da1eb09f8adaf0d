#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "subword/corpus.h"
#include "subword/matrix.h"
#include "subword/model.h"

namespace subword {

// Unigram^0.75 noise distribution over context words.
class NegativeTable {
 public:
  NegativeTable() = default;
  explicit NegativeTable(const Vocabulary& vocab, double power = 0.75);
  explicit NegativeTable(std::span<const std::int64_t> counts, double power = 0.75);

  WordId sample(Rng& rng) const;
  // Draws until the sample differs from `avoid`.
  WordId sample_excluding(Rng& rng, WordId avoid) const;
  double probability(WordId id) const { return probs_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return probs_.size(); }

 private:
  std::vector<double> probs_;
  mutable std::discrete_distribution<WordId> dist_;
};

struct SgnsResult {
  double loss = 0.0;
  std::vector<double> grad_target;
  // dL/dc for the positive context followed by each negative, aligned with
  // the ids passed in.
  std::vector<std::vector<double>> grad_contexts;
};

// loss = -log sigma(w . c+) - sum log sigma(-w . c-)
SgnsResult sgns_loss(std::span<const double> target, WordId context,
                     std::span<const WordId> negatives, const Matrix& context_matrix);

// Same objective, accumulating dL/dw into grad_target and dL/dc into the
// sparse context rows. Returns the loss.
double sgns_accumulate(std::span<const double> target, WordId context,
                       std::span<const WordId> negatives, const Matrix& context_matrix,
                       std::span<double> grad_target, SparseRows& grad_context);

inline constexpr double kAdagradEpsilon = 1e-8;

// acc += g^2; param -= lr * g / (sqrt(acc) + eps)
void adagrad_update(std::span<double> param, std::span<const double> grad,
                    std::span<double> accumulator, double lr);

// lr0 * max(1 - step / total_steps, 1e-4)
double lr_schedule(std::int64_t step, std::int64_t total_steps, double lr0);

// log(1 + exp(x)) without overflow.
double softplus(double x);
double sigmoid(double x);

}  // namespace subword

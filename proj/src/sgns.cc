#include "subword/sgns.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace subword {

namespace {

std::vector<double> powered(std::span<const std::int64_t> counts, double power) {
  std::vector<double> w(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    w[i] = std::pow(static_cast<double>(counts[i]), power);
  }
  return w;
}

std::vector<std::int64_t> vocab_counts(const Vocabulary& vocab) {
  std::vector<std::int64_t> c;
  c.reserve(vocab.size());
  for (const auto& e : vocab.entries()) c.push_back(e.count);
  return c;
}

}  // namespace

NegativeTable::NegativeTable(const Vocabulary& vocab, double power)
    : NegativeTable(vocab_counts(vocab), power) {}

NegativeTable::NegativeTable(std::span<const std::int64_t> counts, double power) {
  if (counts.size() < 2) throw std::invalid_argument("negative sampling needs >= 2 words");
  const auto w = powered(counts, power);
  double total = 0.0;
  for (double v : w) total += v;
  probs_.reserve(w.size());
  for (double v : w) probs_.push_back(v / total);
  dist_ = std::discrete_distribution<WordId>(w.begin(), w.end());
}

WordId NegativeTable::sample(Rng& rng) const { return dist_(rng); }

WordId NegativeTable::sample_excluding(Rng& rng, WordId avoid) const {
  WordId id = dist_(rng);
  while (id == avoid) id = dist_(rng);
  return id;
}

double softplus(double x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double sgns_accumulate(std::span<const double> target, WordId context,
                       std::span<const WordId> negatives, const Matrix& context_matrix,
                       std::span<double> grad_target, SparseRows& grad_context) {
  double loss = 0.0;
  const auto one = [&](WordId id, double label) {
    const auto c = context_matrix.row(static_cast<std::size_t>(id));
    const double score = dot(target, c);
    // label 1: -log sigma(s) = softplus(-s); label 0: -log sigma(-s) = softplus(s)
    loss += label > 0 ? softplus(-score) : softplus(score);
    const double g = sigmoid(score) - label;
    axpy(g, c, grad_target);
    axpy(g, target, grad_context.row(id));
  };
  one(context, 1.0);
  for (WordId neg : negatives) one(neg, 0.0);
  return loss;
}

SgnsResult sgns_loss(std::span<const double> target, WordId context,
                     std::span<const WordId> negatives, const Matrix& context_matrix) {
  SgnsResult out;
  out.grad_target.assign(target.size(), 0.0);
  const auto one = [&](WordId id, double label) {
    const auto c = context_matrix.row(static_cast<std::size_t>(id));
    const double score = dot(target, c);
    out.loss += label > 0 ? softplus(-score) : softplus(score);
    const double g = sigmoid(score) - label;
    axpy(g, c, out.grad_target);
    std::vector<double> gc(target.begin(), target.end());
    for (double& v : gc) v *= g;
    out.grad_contexts.push_back(std::move(gc));
  };
  one(context, 1.0);
  for (WordId neg : negatives) one(neg, 0.0);
  return out;
}

void adagrad_update(std::span<double> param, std::span<const double> grad,
                    std::span<double> accumulator, double lr) {
  if (param.size() != grad.size() || param.size() != accumulator.size()) {
    throw std::invalid_argument("adagrad_update: shape mismatch");
  }
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = grad[i];
    if (g == 0.0) continue;
    accumulator[i] += g * g;
    param[i] -= lr * g / (std::sqrt(accumulator[i]) + kAdagradEpsilon);
  }
}

double lr_schedule(std::int64_t step, std::int64_t total_steps, double lr0) {
  if (total_steps <= 0) return lr0;
  const double frac = 1.0 - static_cast<double>(step) / static_cast<double>(total_steps);
  return lr0 * std::max(frac, 1e-4);
}

}  // namespace subword

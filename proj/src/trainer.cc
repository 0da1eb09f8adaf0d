#include "subword/trainer.h"

#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "subword/batch_kernels.h"
#include "subword/error.h"
#include "subword/sgns.h"

namespace subword {

namespace {

// Keeps the initialisation and training streams apart.
constexpr std::uint64_t kTrainStream = 0x9e3779b97f4a7c15ULL;

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  if (negatives < 1) throw std::invalid_argument("negatives must be >= 1");
  if (!(subsample_t > 0)) throw std::invalid_argument("subsample_t must be > 0");
  if (!(lr0 > 0)) throw std::invalid_argument("lr0 must be > 0");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
}

Rng training_rng(std::uint64_t seed) { return Rng(seed ^ kTrainStream); }

double default_learning_rate(SegmenterKind kind) {
  return kind == SegmenterKind::kUnsupervised ? 0.075 : 0.05;
}

TrainResult train(const std::vector<std::vector<WordId>>& sentences, const Vocabulary& vocab,
                  const std::vector<SubwordSequence>& sequences, std::size_t n_subwords,
                  std::size_t n_positions, const PipelineConfig& config, const TrainConfig& tc,
                  std::ostream* log, const EpochHook& hook) {
  tc.validate();
  if (sequences.size() != vocab.size()) {
    throw std::invalid_argument("train: one subword sequence per vocabulary word required");
  }
  Rng init_rng(tc.seed);
  TrainResult result;
  result.params =
      ModelParameters::initialize(config, n_subwords, n_positions, vocab.size(), init_rng);
  if (tc.epochs == 0) return result;
  ModelParameters& params = result.params;

  const NegativeTable noise(vocab);
  Rng rng = training_rng(tc.seed);

  std::int64_t kept_total = 0;
  for (const auto& e : vocab.entries()) kept_total += e.count;
  std::vector<double> keep(vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    keep[i] = subsample_keep_probability(vocab.count(static_cast<WordId>(i)), kept_total,
                                         tc.subsample_t);
  }

  std::int64_t tokens_per_epoch = 0;
  for (const auto& s : sentences) tokens_per_epoch += static_cast<std::int64_t>(s.size());
  const std::int64_t total_tokens = tokens_per_epoch * tc.epochs;
  std::int64_t tokens_done = 0;

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Batch batch;
  batch.negatives_per_pair = tc.negatives;
  GradientBuffer grads;
  std::vector<GradientBuffer> scratch;
  std::vector<TrainingPair> pending;
  std::vector<WordId> kept;
  double lr = tc.lr0;

  for (int epoch = 1; epoch <= tc.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    double loss_sum = 0.0;
    std::int64_t pair_count = 0;

    const auto run_batch = [&](std::size_t begin, std::size_t end) {
      batch.clear();
      batch.pairs.assign(pending.begin() + static_cast<std::ptrdiff_t>(begin),
                         pending.begin() + static_cast<std::ptrdiff_t>(end));
      for (const TrainingPair& p : batch.pairs) {
        for (int k = 0; k < tc.negatives; ++k) {
          batch.negatives.push_back(noise.sample_excluding(rng, p.context));
        }
      }
      lr = lr_schedule(tokens_done, total_tokens, tc.lr0);
      const double loss =
          tc.workers > 1
              ? batch_gradient_parallel(batch, sequences, params, config, tc.workers, scratch,
                                        grads)
              : batch_gradient_serial(batch, sequences, params, config, grads);
      if (!std::isfinite(loss)) {
        throw NumericError("non-finite loss in epoch " + std::to_string(epoch) + " (" +
                           format_config_label(config) + ")");
      }
      apply_gradients(grads, lr, params);
      loss_sum += loss;
      pair_count += static_cast<std::int64_t>(batch.size());
    };

    const auto bs = static_cast<std::size_t>(tc.batch_size);
    for (const auto& sentence : sentences) {
      kept.clear();
      for (WordId id : sentence) {
        if (unit(rng) < keep[static_cast<std::size_t>(id)]) kept.push_back(id);
      }
      tokens_done += static_cast<std::int64_t>(sentence.size());
      generate_pairs(kept, tc.window, rng, pending);
      if (pending.size() >= bs) {
        std::size_t begin = 0;
        for (; begin + bs <= pending.size(); begin += bs) run_batch(begin, begin + bs);
        pending.erase(pending.begin(), pending.begin() + static_cast<std::ptrdiff_t>(begin));
      }
    }
    if (!pending.empty()) {
      run_batch(0, pending.size());
      pending.clear();
    }

    if (!params.all_finite()) {
      throw NumericError("non-finite parameters after epoch " + std::to_string(epoch) + " (" +
                         format_config_label(config) + ")");
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EpochStats stats;
    stats.epoch = epoch;
    stats.pairs = pair_count;
    stats.mean_loss = pair_count > 0 ? loss_sum / static_cast<double>(pair_count) : 0.0;
    stats.lr = lr;
    stats.words_per_sec = secs > 0 ? static_cast<double>(tokens_per_epoch) / secs : 0.0;
    result.epochs.push_back(stats);
    if (log) {
      *log << format_config_label(config) << " epoch " << epoch << " loss " << stats.mean_loss
           << " lr " << stats.lr << " words/sec " << static_cast<std::int64_t>(stats.words_per_sec)
           << '\n';
    }
    if (hook) hook(stats, params);
  }
  return result;
}

TrainedModel train_model(const std::vector<std::vector<WordId>>& sentences, Vocabulary vocab,
                         SubwordIndex index, const TrainConfig& tc, std::ostream* log,
                         std::vector<EpochStats>* epochs) {
  const std::vector<SubwordSequence> sequences = index.build(vocab);
  TrainResult r = train(sentences, vocab, sequences, index.subwords().size(),
                        index.position_rows(), index.config(), tc, log);
  if (epochs) *epochs = r.epochs;
  TrainedModel model{std::move(vocab), std::move(index), std::move(r.params), {}};
  model.metadata["label"] = model.label();
  model.metadata["seed"] = std::to_string(tc.seed);
  model.metadata["epochs"] = std::to_string(tc.epochs);
  model.metadata["window"] = std::to_string(tc.window);
  model.metadata["negatives"] = std::to_string(tc.negatives);
  model.metadata["batch_size"] = std::to_string(tc.batch_size);
  return model;
}

}  // namespace subword

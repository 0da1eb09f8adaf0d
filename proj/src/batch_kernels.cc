#include "subword/batch_kernels.h"

#include <omp.h>

#include <span>
#include <utility>

#include "subword/sgns.h"

namespace subword {

namespace {

using Group = std::pair<std::size_t, std::size_t>;  // [begin, end) into batch.pairs

std::vector<Group> target_groups(const Batch& batch) {
  std::vector<Group> groups;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= batch.size(); ++i) {
    if (i == batch.size() || batch.pairs[i].target != batch.pairs[begin].target) {
      groups.emplace_back(begin, i);
      begin = i;
    }
  }
  return groups;
}

double process_group(const Batch& batch, Group g, const std::vector<SubwordSequence>& sequences,
                     const ModelParameters& params, const PipelineConfig& config,
                     std::vector<double>& grad_word, GradientBuffer& out) {
  const WordId target = batch.pairs[g.first].target;
  const CompositionTrace trace =
      compose_word(sequences[static_cast<std::size_t>(target)], params, config, true);
  grad_word.assign(static_cast<std::size_t>(params.dim), 0.0);
  const auto k = static_cast<std::size_t>(batch.negatives_per_pair);
  double loss = 0.0;
  for (std::size_t i = g.first; i < g.second; ++i) {
    const std::span<const WordId> negs(batch.negatives.data() + i * k, k);
    loss += sgns_accumulate(trace.word, batch.pairs[i].context, negs, params.context, grad_word,
                            out.context);
  }
  backward(trace, grad_word, params, config, out);
  return loss;
}

void apply_sparse(const SparseRows& grads, double lr, Matrix& param, Matrix& acc) {
  for (std::size_t s = 0; s < grads.size(); ++s) {
    const auto id = static_cast<std::size_t>(grads.id_at(s));
    adagrad_update(param.row(id), grads.row_at(s), acc.row(id), lr);
  }
}

}  // namespace

double batch_gradient_serial(const Batch& batch, const std::vector<SubwordSequence>& sequences,
                             const ModelParameters& params, const PipelineConfig& config,
                             GradientBuffer& out) {
  out.reset(params);
  std::vector<double> grad_word;
  double loss = 0.0;
  for (const Group& g : target_groups(batch)) {
    loss += process_group(batch, g, sequences, params, config, grad_word, out);
  }
  return loss;
}

double batch_gradient_parallel(const Batch& batch, const std::vector<SubwordSequence>& sequences,
                               const ModelParameters& params, const PipelineConfig& config,
                               int workers, std::vector<GradientBuffer>& scratch,
                               GradientBuffer& out) {
  if (workers <= 1) return batch_gradient_serial(batch, sequences, params, config, out);
  const std::vector<Group> groups = target_groups(batch);
  scratch.resize(static_cast<std::size_t>(workers));
  for (GradientBuffer& b : scratch) b.reset(params);
  std::vector<double> losses(static_cast<std::size_t>(workers), 0.0);
  const auto n_groups = static_cast<std::ptrdiff_t>(groups.size());

#pragma omp parallel num_threads(workers)
  {
    const auto tid = static_cast<std::size_t>(omp_get_thread_num());
    GradientBuffer& local = scratch[tid];
    std::vector<double> grad_word;
    double loss = 0.0;
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n_groups; ++i) {
      loss += process_group(batch, groups[static_cast<std::size_t>(i)], sequences, params, config,
                            grad_word, local);
    }
    losses[tid] = loss;
  }

  // The team may be smaller than requested; unused buffers stay empty.
  out.reset(params);
  double loss = 0.0;
  for (std::size_t t = 0; t < scratch.size(); ++t) {
    out.add(scratch[t]);
    loss += losses[t];
  }
  return loss;
}

void apply_gradients(const GradientBuffer& grads, double lr, ModelParameters& params) {
  apply_sparse(grads.subwords, lr, params.subwords, params.subwords_acc);
  apply_sparse(grads.positions, lr, params.positions, params.positions_acc);
  apply_sparse(grads.context, lr, params.context, params.context_acc);
  if (!params.att_hidden.empty()) {
    adagrad_update(params.att_hidden.values(), grads.att_hidden.values(),
                   params.att_hidden_acc.values(), lr);
    adagrad_update(params.att_heads.values(), grads.att_heads.values(),
                   params.att_heads_acc.values(), lr);
  }
}

}  // namespace subword

#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "subword/config.h"
#include "subword/corpus.h"
#include "subword/matrix.h"
#include "subword/segmentation.h"

namespace subword {

// All trainable matrices plus their AdaGrad accumulators.
struct ModelParameters {
  int dim = 0;
  Matrix subwords;    // |S| x d
  Matrix positions;   // p x d, empty without position embeddings
  Matrix context;     // |V| x d
  Matrix att_hidden;  // h x d, empty for add
  Matrix att_heads;   // k x h, empty for add

  Matrix subwords_acc;
  Matrix positions_acc;
  Matrix context_acc;
  Matrix att_hidden_acc;
  Matrix att_heads_acc;

  // W_s, W_c ~ U(-0.5/d, 0.5/d); W_p = 0 (pp) or 1 (mp) so training starts
  // at the position-free model; attention ~ U(-1/sqrt(d), 1/sqrt(d)).
  static ModelParameters initialize(const PipelineConfig& config, std::size_t n_subwords,
                                    std::size_t n_positions, std::size_t n_words, Rng& rng);

  bool all_finite() const;
  friend bool operator==(const ModelParameters&, const ModelParameters&) = default;
};

// r = s (p-), s + p (pp) or s * p elementwise (mp).
void interact_position(std::span<const double> s, std::span<const double> p, PositionMode mode,
                       std::span<double> r);
std::vector<double> interact_position(std::span<const double> s, std::span<const double> p,
                                      PositionMode mode);

// Sum of the rows of r. Throws on an empty sequence.
std::vector<double> compose_add(const Matrix& r);

struct AttentionForward {
  Matrix hidden;                // H = tanh(W_h1 R^T), h x n
  Matrix attention;             // A = rowsoftmax(W_h2 H), k x n
  std::vector<double> weights;  // a, mean of the rows of A
  std::vector<double> word;     // sum_i a_i r_i
};

// Self-attention pooling over the n rows of r. Softmax runs over sequence
// positions, one row per head.
AttentionForward compose_attention(const Matrix& r, const Matrix& w_hidden, const Matrix& w_heads);

// Backpropagates grad_word through compose_attention, accumulating into the
// three gradient matrices.
void attention_backward(const Matrix& r, const Matrix& w_hidden, const Matrix& w_heads,
                        const AttentionForward& fwd, std::span<const double> grad_word,
                        Matrix& grad_r, Matrix& grad_hidden, Matrix& grad_heads);

struct CompositionTrace {
  std::vector<std::int32_t> units;
  std::vector<std::int32_t> positions;
  Matrix s;  // looked-up subword rows, n x d
  Matrix r;  // after position interaction, n x d
  AttentionForward attention;  // populated for att/mtx
  std::vector<double> word;
  bool retained = false;

  std::size_t length() const { return units.size(); }
};

// w = f(delta(w), W_s, W_p). An empty sequence (every unit unknown) yields
// the zero vector. With retain = false only `word` is kept.
CompositionTrace compose_word(const SubwordSequence& seq, const ModelParameters& params,
                              const PipelineConfig& config, bool retain = true);

// Sparse collection of gradient rows keyed by row id.
class SparseRows {
 public:
  explicit SparseRows(std::size_t cols = 0) : cols_(cols) {}

  void reset(std::size_t cols);
  // Row for id, zero-initialised on first touch. Invalidated by the next
  // call that touches a new id.
  std::span<double> row(std::int32_t id);
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return ids_.size(); }
  std::int32_t id_at(std::size_t slot) const { return ids_[slot]; }
  std::span<const double> row_at(std::size_t slot) const {
    return {data_.data() + slot * cols_, cols_};
  }
  const double* find(std::int32_t id) const;
  void add(const SparseRows& other);

 private:
  std::size_t cols_;
  std::unordered_map<std::int32_t, std::size_t> slot_;
  std::vector<std::int32_t> ids_;
  std::vector<double> data_;
};

struct GradientBuffer {
  SparseRows subwords;
  SparseRows positions;
  SparseRows context;
  Matrix att_hidden;
  Matrix att_heads;

  // Empties the buffer and sizes it for params.
  void reset(const ModelParameters& params);
  void add(const GradientBuffer& other);
};

// Accumulates dL/dparams for dL/dw = grad_word into out. Touched W_s/W_p
// rows are sparse; attention gradients are dense. Throws if the trace was
// built without retained intermediates.
void backward(const CompositionTrace& trace, std::span<const double> grad_word,
              const ModelParameters& params, const PipelineConfig& config, GradientBuffer& out);

}  // namespace subword

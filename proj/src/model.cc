#include "subword/model.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace subword {

namespace {

void fill_uniform(Matrix& m, Rng& rng, double bound) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& v : m.values()) v = dist(rng);
}

}  // namespace

ModelParameters ModelParameters::initialize(const PipelineConfig& config, std::size_t n_subwords,
                                            std::size_t n_positions, std::size_t n_words,
                                            Rng& rng) {
  config.validate();
  const auto d = static_cast<std::size_t>(config.dim);
  ModelParameters p;
  p.dim = config.dim;
  p.subwords = Matrix(n_subwords, d);
  p.context = Matrix(n_words, d);
  fill_uniform(p.subwords, rng, 0.5 / config.dim);
  fill_uniform(p.context, rng, 0.5 / config.dim);
  if (config.uses_positions()) {
    const double init = config.position_mode == PositionMode::kMultiplicative ? 1.0 : 0.0;
    p.positions = Matrix(n_positions, d, init);
  }
  if (config.uses_attention()) {
    const auto h = static_cast<std::size_t>(config.attention_hidden);
    const auto k = static_cast<std::size_t>(config.attention_heads());
    const double bound = 1.0 / std::sqrt(static_cast<double>(config.dim));
    p.att_hidden = Matrix(h, d);
    p.att_heads = Matrix(k, h);
    fill_uniform(p.att_hidden, rng, bound);
    fill_uniform(p.att_heads, rng, bound);
  }
  p.subwords_acc = Matrix(p.subwords.rows(), p.subwords.cols());
  p.positions_acc = Matrix(p.positions.rows(), p.positions.cols());
  p.context_acc = Matrix(p.context.rows(), p.context.cols());
  p.att_hidden_acc = Matrix(p.att_hidden.rows(), p.att_hidden.cols());
  p.att_heads_acc = Matrix(p.att_heads.rows(), p.att_heads.cols());
  return p;
}

bool ModelParameters::all_finite() const {
  return subwords.all_finite() && positions.all_finite() && context.all_finite() &&
         att_hidden.all_finite() && att_heads.all_finite() && subwords_acc.all_finite() &&
         positions_acc.all_finite() && context_acc.all_finite() && att_hidden_acc.all_finite() &&
         att_heads_acc.all_finite();
}

void interact_position(std::span<const double> s, std::span<const double> p, PositionMode mode,
                       std::span<double> r) {
  if (r.size() != s.size()) throw std::invalid_argument("interact_position: dimension mismatch");
  if (mode != PositionMode::kNone && p.size() != s.size()) {
    throw std::invalid_argument("interact_position: dimension mismatch");
  }
  switch (mode) {
    case PositionMode::kNone:
      std::copy(s.begin(), s.end(), r.begin());
      break;
    case PositionMode::kAdditive:
      for (std::size_t i = 0; i < s.size(); ++i) r[i] = s[i] + p[i];
      break;
    case PositionMode::kMultiplicative:
      for (std::size_t i = 0; i < s.size(); ++i) r[i] = s[i] * p[i];
      break;
  }
}

std::vector<double> interact_position(std::span<const double> s, std::span<const double> p,
                                      PositionMode mode) {
  std::vector<double> r(s.size());
  interact_position(s, p, mode, r);
  return r;
}

std::vector<double> compose_add(const Matrix& r) {
  if (r.rows() == 0) throw std::invalid_argument("empty subword sequence");
  std::vector<double> w(r.cols(), 0.0);
  for (std::size_t i = 0; i < r.rows(); ++i) axpy(1.0, r.row(i), w);
  return w;
}

AttentionForward compose_attention(const Matrix& r, const Matrix& w_hidden,
                                   const Matrix& w_heads) {
  const std::size_t n = r.rows();
  const std::size_t d = r.cols();
  if (n == 0) throw std::invalid_argument("empty subword sequence");
  if (w_hidden.cols() != d || w_heads.cols() != w_hidden.rows()) {
    throw std::invalid_argument("compose_attention: shape mismatch");
  }
  const std::size_t h = w_hidden.rows();
  const std::size_t k = w_heads.rows();

  AttentionForward f;
  f.hidden = Matrix(h, n);
  for (std::size_t j = 0; j < h; ++j) {
    const auto wj = w_hidden.row(j);
    for (std::size_t i = 0; i < n; ++i) f.hidden(j, i) = std::tanh(dot(wj, r.row(i)));
  }

  f.attention = Matrix(k, n);
  for (std::size_t q = 0; q < k; ++q) {
    auto row = f.attention.row(q);
    for (std::size_t i = 0; i < n; ++i) {
      double z = 0.0;
      for (std::size_t j = 0; j < h; ++j) z += w_heads(q, j) * f.hidden(j, i);
      row[i] = z;
    }
    const double top = *std::max_element(row.begin(), row.end());
    double total = 0.0;
    for (double& v : row) {
      v = std::exp(v - top);
      total += v;
    }
    for (double& v : row) v /= total;
  }

  f.weights.assign(n, 0.0);
  for (std::size_t q = 0; q < k; ++q) axpy(1.0, f.attention.row(q), f.weights);
  if (k > 1) {
    for (double& a : f.weights) a /= static_cast<double>(k);
  }

  f.word.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) axpy(f.weights[i], r.row(i), f.word);
  return f;
}

void attention_backward(const Matrix& r, const Matrix& w_hidden, const Matrix& w_heads,
                        const AttentionForward& fwd, std::span<const double> grad_word,
                        Matrix& grad_r, Matrix& grad_hidden, Matrix& grad_heads) {
  const std::size_t n = r.rows();
  const std::size_t h = w_hidden.rows();
  const std::size_t k = w_heads.rows();

  // w = sum_i a_i r_i
  std::vector<double> grad_a(n);
  for (std::size_t i = 0; i < n; ++i) {
    grad_a[i] = dot(grad_word, r.row(i));
    axpy(fwd.weights[i], grad_word, grad_r.row(i));
  }

  // a = mean over heads; softmax backward per head row.
  const double inv_k = 1.0 / static_cast<double>(k);
  Matrix grad_scores(k, n);
  for (std::size_t q = 0; q < k; ++q) {
    const auto a = fwd.attention.row(q);
    double inner = 0.0;
    for (std::size_t i = 0; i < n; ++i) inner += a[i] * grad_a[i] * inv_k;
    for (std::size_t i = 0; i < n; ++i) grad_scores(q, i) = a[i] * (grad_a[i] * inv_k - inner);
  }

  // scores = W_h2 H
  Matrix grad_pre(h, n);
  for (std::size_t j = 0; j < h; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      double g = 0.0;
      for (std::size_t q = 0; q < k; ++q) g += w_heads(q, j) * grad_scores(q, i);
      const double hv = fwd.hidden(j, i);
      grad_pre(j, i) = g * (1.0 - hv * hv);
    }
  }
  for (std::size_t q = 0; q < k; ++q) {
    for (std::size_t j = 0; j < h; ++j) {
      double g = 0.0;
      for (std::size_t i = 0; i < n; ++i) g += grad_scores(q, i) * fwd.hidden(j, i);
      grad_heads(q, j) += g;
    }
  }

  // H = tanh(W_h1 R^T)
  for (std::size_t j = 0; j < h; ++j) {
    const auto wj = w_hidden.row(j);
    auto gj = grad_hidden.row(j);
    for (std::size_t i = 0; i < n; ++i) {
      const double g = grad_pre(j, i);
      if (g == 0.0) continue;
      axpy(g, r.row(i), gj);
      axpy(g, wj, grad_r.row(i));
    }
  }
}

CompositionTrace compose_word(const SubwordSequence& seq, const ModelParameters& params,
                              const PipelineConfig& config, bool retain) {
  const auto d = static_cast<std::size_t>(params.dim);
  const std::size_t n = seq.units.size();
  CompositionTrace t;
  t.retained = retain;
  t.units = seq.units;
  t.positions = seq.positions;
  if (n == 0) {
    t.word.assign(d, 0.0);
    return t;
  }

  t.s = Matrix(n, d);
  t.r = Matrix(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto unit = static_cast<std::size_t>(seq.units[i]);
    const auto s_row = params.subwords.row(unit);
    std::copy(s_row.begin(), s_row.end(), t.s.row(i).begin());
    if (config.uses_positions()) {
      const auto pos = static_cast<std::size_t>(seq.positions[i]);
      interact_position(s_row, params.positions.row(pos), config.position_mode, t.r.row(i));
    } else {
      std::copy(s_row.begin(), s_row.end(), t.r.row(i).begin());
    }
  }

  if (config.composition == Composition::kAdd) {
    t.word = compose_add(t.r);
    if (config.add_mean) {
      for (double& v : t.word) v /= static_cast<double>(n);
    }
  } else {
    t.attention = compose_attention(t.r, params.att_hidden, params.att_heads);
    t.word = t.attention.word;
  }

  if (!retain) {
    t.s = Matrix();
    t.r = Matrix();
    t.attention = AttentionForward{};
  }
  return t;
}

void SparseRows::reset(std::size_t cols) {
  cols_ = cols;
  slot_.clear();
  ids_.clear();
  data_.clear();
}

std::span<double> SparseRows::row(std::int32_t id) {
  const auto [it, inserted] = slot_.try_emplace(id, ids_.size());
  if (inserted) {
    ids_.push_back(id);
    data_.resize(data_.size() + cols_, 0.0);
  }
  return {data_.data() + it->second * cols_, cols_};
}

const double* SparseRows::find(std::int32_t id) const {
  const auto it = slot_.find(id);
  return it == slot_.end() ? nullptr : data_.data() + it->second * cols_;
}

void SparseRows::add(const SparseRows& other) {
  for (std::size_t s = 0; s < other.size(); ++s) {
    axpy(1.0, other.row_at(s), row(other.id_at(s)));
  }
}

void GradientBuffer::reset(const ModelParameters& params) {
  const auto d = static_cast<std::size_t>(params.dim);
  subwords.reset(d);
  positions.reset(d);
  context.reset(d);
  att_hidden = Matrix(params.att_hidden.rows(), params.att_hidden.cols());
  att_heads = Matrix(params.att_heads.rows(), params.att_heads.cols());
}

void GradientBuffer::add(const GradientBuffer& other) {
  subwords.add(other.subwords);
  positions.add(other.positions);
  context.add(other.context);
  axpy(1.0, other.att_hidden.values(), att_hidden.values());
  axpy(1.0, other.att_heads.values(), att_heads.values());
}

void backward(const CompositionTrace& trace, std::span<const double> grad_word,
              const ModelParameters& params, const PipelineConfig& config, GradientBuffer& out) {
  if (!trace.retained) throw std::logic_error("backward: trace has no retained intermediates");
  const std::size_t n = trace.length();
  if (n == 0) return;
  const auto d = static_cast<std::size_t>(params.dim);

  Matrix grad_r(n, d);
  if (config.composition == Composition::kAdd) {
    const double scale = config.add_mean ? 1.0 / static_cast<double>(n) : 1.0;
    for (std::size_t i = 0; i < n; ++i) axpy(scale, grad_word, grad_r.row(i));
  } else {
    attention_backward(trace.r, params.att_hidden, params.att_heads, trace.attention, grad_word,
                       grad_r, out.att_hidden, out.att_heads);
  }

  for (std::size_t i = 0; i < n; ++i) {
    const auto gr = grad_r.row(i);
    switch (config.position_mode) {
      case PositionMode::kNone:
        axpy(1.0, gr, out.subwords.row(trace.units[i]));
        break;
      case PositionMode::kAdditive:
        axpy(1.0, gr, out.subwords.row(trace.units[i]));
        axpy(1.0, gr, out.positions.row(trace.positions[i]));
        break;
      case PositionMode::kMultiplicative: {
        const auto p = params.positions.row(static_cast<std::size_t>(trace.positions[i]));
        const auto s = trace.s.row(i);
        auto gs = out.subwords.row(trace.units[i]);
        for (std::size_t c = 0; c < d; ++c) gs[c] += gr[c] * p[c];
        auto gp = out.positions.row(trace.positions[i]);
        for (std::size_t c = 0; c < d; ++c) gp[c] += gr[c] * s[c];
        break;
      }
    }
  }
}

}  // namespace subword

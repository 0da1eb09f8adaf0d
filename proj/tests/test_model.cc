#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gradcheck.h"
#include "subword/config.h"
#include "subword/corpus.h"
#include "subword/model.h"
#include "subword/segmentation.h"

using namespace subword;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng, double scale = 1.0) {
  Matrix m(r, c);
  std::uniform_real_distribution<double> u(-scale, scale);
  for (double& v : m.values()) v = u(rng);
  return m;
}

// Extended-precision forward oracle: tanh, row softmax, mean of rows,
// weighted sum.
std::vector<long double> attention_oracle(const Matrix& R, const Matrix& W1, const Matrix& W2,
                                          std::vector<long double>& a) {
  const std::size_t n = R.rows(), d = R.cols(), h = W1.rows(), k = W2.rows();
  std::vector<std::vector<long double>> H(h, std::vector<long double>(n));
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      long double s = 0;
      for (std::size_t c = 0; c < d; ++c) s += (long double)W1(i, c) * R(j, c);
      H[i][j] = std::tanh(s);
    }
  a.assign(n, 0.0L);
  for (std::size_t q = 0; q < k; ++q) {
    std::vector<long double> z(n);
    for (std::size_t j = 0; j < n; ++j) {
      long double s = 0;
      for (std::size_t i = 0; i < h; ++i) s += (long double)W2(q, i) * H[i][j];
      z[j] = s;
    }
    long double total = 0;
    for (auto& v : z) total += std::exp(v);
    for (std::size_t j = 0; j < n; ++j) a[j] += std::exp(z[j]) / total / k;
  }
  std::vector<long double> w(d, 0.0L);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t c = 0; c < d; ++c) w[c] += a[j] * R(j, c);
  return w;
}

SubwordSequence seq_of(std::vector<std::int32_t> units, std::vector<std::int32_t> positions = {}) {
  SubwordSequence s;
  s.units = std::move(units);
  s.positions = positions.empty() ? std::vector<std::int32_t>(s.units.size(), 0) : positions;
  return s;
}

}  // namespace

TEST(Interact, Examples) {
  const std::vector<double> s = {1, 2};
  EXPECT_EQ(interact_position(s, std::vector<double>{3, -1}, PositionMode::kAdditive),
            (std::vector<double>{4, 1}));
  EXPECT_EQ(interact_position(s, std::vector<double>{1, 1}, PositionMode::kMultiplicative), s);
  EXPECT_EQ(interact_position(s, std::vector<double>{0, 0}, PositionMode::kAdditive), s);
  EXPECT_EQ(interact_position(s, std::vector<double>{}, PositionMode::kNone), s);
  EXPECT_THROW(interact_position(s, std::vector<double>{1, 2, 3}, PositionMode::kAdditive),
               std::invalid_argument);
}

TEST(ComposeAdd, Basics) {
  Matrix one(1, 3);
  one(0, 0) = 1.5;
  one(0, 2) = -2;
  EXPECT_EQ(compose_add(one), (std::vector<double>{1.5, 0, -2}));
  Matrix cancel(2, 2);
  cancel(0, 0) = 0.25;
  cancel(0, 1) = -3;
  cancel(1, 0) = -0.25;
  cancel(1, 1) = 3;
  EXPECT_EQ(compose_add(cancel), (std::vector<double>{0, 0}));
  try {
    compose_add(Matrix(0, 3));
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "empty subword sequence");
  }
}

TEST(ComposeAdd, MatchesNaiveSumAndIsPermutationInvariant) {
  std::mt19937_64 rng(4);
  const Matrix R = random_matrix(3, 4, rng);
  std::vector<double> want(4, 0.0);
  for (std::size_t c = 0; c < 4; ++c) want[c] = (R(0, c) + R(1, c)) + R(2, c);
  const auto got = compose_add(R);
  for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(got[c], want[c], 1e-15);
  Matrix P(3, 4);
  for (std::size_t c = 0; c < 4; ++c) {
    P(0, c) = R(2, c);
    P(1, c) = R(0, c);
    P(2, c) = R(1, c);
  }
  const auto gp = compose_add(P);
  for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(gp[c], got[c], 1e-15);
}

TEST(Attention, SingleElementIsIdentity) {
  std::mt19937_64 rng(1);
  const Matrix R = random_matrix(1, 3, rng);
  const auto f = compose_attention(R, random_matrix(4, 3, rng), random_matrix(2, 4, rng));
  ASSERT_EQ(f.weights.size(), 1u);
  EXPECT_DOUBLE_EQ(f.weights[0], 1.0);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_DOUBLE_EQ(f.word[c], R(0, c));
}

TEST(Attention, ZeroSecondLayerGivesUniformWeights) {
  std::mt19937_64 rng(2);
  for (std::size_t n = 1; n <= 7; ++n) {
    const Matrix R = random_matrix(n, 3, rng);
    const auto f = compose_attention(R, random_matrix(4, 3, rng), Matrix(3, 4));
    for (double a : f.weights) EXPECT_DOUBLE_EQ(a, 1.0 / static_cast<double>(n));
    const auto sum = compose_add(R);
    for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(f.word[c], sum[c] / n, 1e-14);
  }
}

TEST(Attention, MatchesExtendedPrecisionOracle) {
  // n=3, d=2, h=2, k=2 with small integer parameters.
  Matrix R(3, 2), W1(2, 2), W2(2, 2);
  const double r[] = {1, -1, 0, 2, 2, 1};
  const double w1[] = {1, 0, -1, 1};
  const double w2[] = {2, -1, 0, 1};
  std::copy(r, r + 6, R.values().begin());
  std::copy(w1, w1 + 4, W1.values().begin());
  std::copy(w2, w2 + 4, W2.values().begin());
  std::vector<long double> a;
  const auto w = attention_oracle(R, W1, W2, a);
  const auto f = compose_attention(R, W1, W2);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(f.weights[j], (double)a[j], 1e-15);
  for (std::size_t c = 0; c < 2; ++c) EXPECT_NEAR(f.word[c], (double)w[c], 1e-15);

  std::mt19937_64 rng(9);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + t % 9, d = 2 + t % 4, h = 1 + t % 3, k = 1 + t % 4;
    const Matrix Rr = random_matrix(n, d, rng, 2.0);
    const Matrix A = random_matrix(h, d, rng, 2.0), B = random_matrix(k, h, rng, 3.0);
    const auto ww = attention_oracle(Rr, A, B, a);
    const auto ff = compose_attention(Rr, A, B);
    for (std::size_t c = 0; c < d; ++c) EXPECT_NEAR(ff.word[c], (double)ww[c], 1e-13);
  }
}

TEST(Attention, WeightsAreADistribution) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t n = 1 + t % 16;
    const auto f = compose_attention(random_matrix(n, 4, rng, 3.0), random_matrix(5, 4, rng, 3.0),
                                     random_matrix(1 + t % 4, 5, rng, 10.0));
    double s = 0.0;
    for (double a : f.weights) {
      EXPECT_GE(a, 0.0);
      s += a;
    }
    EXPECT_NEAR(s, 1.0, 1e-6);
  }
}

TEST(Attention, StableUnderLargeLogits) {
  Matrix R(2, 1), W1(1, 1), W2(1, 1);
  R(0, 0) = 1;
  R(1, 0) = -1;
  W1(0, 0) = 5;
  W2(0, 0) = 2000;  // softmax arguments of +-2000
  const auto f = compose_attention(R, W1, W2);
  EXPECT_TRUE(std::isfinite(f.weights[0]));
  EXPECT_NEAR(f.weights[0], 1.0, 1e-12);
}

TEST(Attention, IdenticalHeadsEqualSingleHead) {
  std::mt19937_64 rng(6);
  const Matrix R = random_matrix(5, 3, rng), W1 = random_matrix(4, 3, rng);
  const Matrix row = random_matrix(1, 4, rng);
  Matrix heads(3, 4);
  for (std::size_t q = 0; q < 3; ++q)
    for (std::size_t i = 0; i < 4; ++i) heads(q, i) = row(0, i);
  const auto one = compose_attention(R, W1, row);
  const auto many = compose_attention(R, W1, heads);
  for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(one.weights[j], many.weights[j], 1e-15);
}

TEST(Attention, PermutationEquivariant) {
  std::mt19937_64 rng(7);
  const Matrix R = random_matrix(4, 3, rng), W1 = random_matrix(2, 3, rng),
               W2 = random_matrix(2, 2, rng);
  const std::vector<std::size_t> perm = {2, 0, 3, 1};
  Matrix P(4, 3);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t c = 0; c < 3; ++c) P(i, c) = R(perm[i], c);
  const auto f = compose_attention(R, W1, W2), g = compose_attention(P, W1, W2);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(g.weights[i], f.weights[perm[i]], 1e-15);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(g.word[c], f.word[c], 1e-14);
}

TEST(Attention, EmptySequenceRejected) {
  EXPECT_THROW(compose_attention(Matrix(0, 2), Matrix(2, 2), Matrix(1, 2)), std::invalid_argument);
}

TEST(ComposeWord, WholeWordAddIsTheEmbeddingRow) {
  auto config = parse_run_label("word.w-.p-.add");
  config.dim = 4;
  Rng rng(3);
  const auto p = ModelParameters::initialize(config, 5, 0, 5, rng);
  const auto t = compose_word(seq_of({3}), p, config);
  const auto row = p.subwords.row(3);
  EXPECT_TRUE(std::equal(t.word.begin(), t.word.end(), row.begin()));
}

TEST(ComposeWord, EmptySequenceIsZeroVector) {
  auto config = parse_config_label("bpe.ww.pp.att");
  config.dim = 3;
  Rng rng(3);
  const auto p = ModelParameters::initialize(config, 5, 20, 5, rng);
  const auto t = compose_word(SubwordSequence{}, p, config);
  EXPECT_EQ(t.word, (std::vector<double>{0, 0, 0}));
}

TEST(ComposeWord, PositionInitialisationIsNeutral) {
  // pp starts from zeros and mp from ones, so both equal p- at init.
  for (const char* mode : {"pp", "mp"}) {
    auto with = parse_config_label(std::string("bpe.ww.") + mode + ".att");
    auto without = parse_config_label("bpe.ww.p-.att");
    with.dim = without.dim = 6;
    Rng a(11), b(11);
    const auto pw = ModelParameters::initialize(with, 8, 20, 4, a);
    auto pn = ModelParameters::initialize(without, 8, 0, 4, b);
    pn.subwords = pw.subwords;
    pn.att_hidden = pw.att_hidden;
    pn.att_heads = pw.att_heads;
    const auto s = seq_of({1, 5, 2}, {0, 1, 2});
    EXPECT_EQ(compose_word(s, pw, with).word, compose_word(s, pn, without).word) << mode;
  }
}

TEST(ComposeWord, DeterministicForward) {
  auto config = parse_config_label("bpe.ww.mp.mtx");
  config.dim = 7;
  Rng rng(1);
  const auto p = ModelParameters::initialize(config, 10, 20, 3, rng);
  const auto s = seq_of({1, 4, 9, 4}, {0, 1, 2, 3});
  EXPECT_EQ(compose_word(s, p, config).word, compose_word(s, p, config).word);
}

TEST(Init, RangesAndShapes) {
  auto config = parse_config_label("bpe.ww.mp.mtx");
  config.dim = 16;
  Rng rng(2);
  const auto p = ModelParameters::initialize(config, 30, 20, 12, rng);
  EXPECT_EQ(p.subwords.rows(), 30u);
  EXPECT_EQ(p.context.rows(), 12u);
  EXPECT_EQ(p.positions.rows(), 20u);
  EXPECT_EQ(p.att_hidden.rows(), 64u);
  EXPECT_EQ(p.att_hidden.cols(), 16u);
  EXPECT_EQ(p.att_heads.rows(), 4u);
  EXPECT_EQ(p.att_heads.cols(), 64u);
  for (double v : p.subwords.values()) EXPECT_LE(std::abs(v), 0.5 / 16);
  for (double v : p.context.values()) EXPECT_LE(std::abs(v), 0.5 / 16);
  for (double v : p.positions.values()) EXPECT_EQ(v, 1.0);
  for (double v : p.att_hidden.values()) EXPECT_LE(std::abs(v), 0.25);
  for (double v : p.subwords_acc.values()) EXPECT_EQ(v, 0.0);
  auto pp = parse_config_label("bpe.ww.pp.add");
  pp.dim = 4;
  const auto q = ModelParameters::initialize(pp, 3, 20, 3, rng);
  for (double v : q.positions.values()) EXPECT_EQ(v, 0.0);
  EXPECT_TRUE(q.att_hidden.empty());
}

TEST(Backward, AddGradientIsGradWordPerRow) {
  auto config = parse_config_label("bpe.ww.p-.add");
  config.dim = 3;
  Rng rng(1);
  const auto p = ModelParameters::initialize(config, 6, 0, 2, rng);
  const auto t = compose_word(seq_of({0, 2, 5, 2}), p, config);
  GradientBuffer g;
  g.reset(p);
  const std::vector<double> gw = {0.5, -1, 2};
  backward(t, gw, p, config, g);
  EXPECT_EQ(g.subwords.size(), 3u);
  for (std::int32_t id : {0, 5}) {
    const double* row = g.subwords.find(id);
    ASSERT_NE(row, nullptr);
    for (int c = 0; c < 3; ++c) EXPECT_EQ(row[c], gw[static_cast<std::size_t>(c)]);
  }
  const double* twice = g.subwords.find(2);  // occurs twice
  for (int c = 0; c < 3; ++c) EXPECT_EQ(twice[c], 2 * gw[static_cast<std::size_t>(c)]);
  EXPECT_EQ(g.subwords.find(1), nullptr);
}

TEST(Backward, MultiplicativeProductRule) {
  auto config = parse_config_label("bpe.ww.mp.add");
  config.dim = 2;
  Rng rng(1);
  auto p = ModelParameters::initialize(config, 2, 4, 2, rng);
  p.subwords(1, 0) = 3;
  p.subwords(1, 1) = -2;
  p.positions(2, 0) = 0.5;
  p.positions(2, 1) = 4;
  const auto t = compose_word(seq_of({1}, {2}), p, config);
  GradientBuffer g;
  g.reset(p);
  backward(t, std::vector<double>{1, 10}, p, config, g);
  const double* gs = g.subwords.find(1);
  const double* gp = g.positions.find(2);
  EXPECT_DOUBLE_EQ(gs[0], 0.5);
  EXPECT_DOUBLE_EQ(gs[1], 40);
  EXPECT_DOUBLE_EQ(gp[0], 3);
  EXPECT_DOUBLE_EQ(gp[1], -20);
}

TEST(Backward, RequiresRetainedTrace) {
  auto config = parse_config_label("bpe.ww.p-.att");
  config.dim = 2;
  Rng rng(1);
  const auto p = ModelParameters::initialize(config, 3, 0, 2, rng);
  const auto t = compose_word(seq_of({0, 1}), p, config, false);
  GradientBuffer g;
  g.reset(p);
  EXPECT_THROW(backward(t, std::vector<double>{1, 1}, p, config, g), std::logic_error);
}

TEST(Backward, MatchesFiniteDifferencesEverywhere) {
  std::mt19937_64 rng(2024);
  auto labels = subword::testing::gradient_check_labels();
  labels.push_back("bpe.w-.mp.att");
  for (const auto& label : labels) {
    for (int i = 0; i < 100; ++i) {
      auto g = subword::testing::make_grad_instance(parse_config_label(label), rng);
      const double err = subword::testing::max_gradient_error(g);
      ASSERT_LE(err, 1e-4) << label << " instance " << i;
    }
  }
}

TEST(Backward, MeanAddVariant) {
  std::mt19937_64 rng(77);
  auto config = parse_config_label("bpe.ww.pp.add");
  config.add_mean = true;
  for (int i = 0; i < 50; ++i) {
    auto g = subword::testing::make_grad_instance(config, rng);
    EXPECT_LE(subword::testing::max_gradient_error(g), 1e-4);
  }
}

TEST(SparseRows, AccumulatesByIdInFirstTouchOrder) {
  SparseRows a(2), b(2);
  a.row(7)[0] = 1;
  a.row(3)[1] = 2;
  b.row(3)[1] = 5;
  b.row(9)[0] = -1;
  a.add(b);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a.id_at(0), 7);
  EXPECT_EQ(a.id_at(1), 3);
  EXPECT_EQ(a.id_at(2), 9);
  EXPECT_EQ(a.find(3)[1], 7);
  EXPECT_EQ(a.find(9)[0], -1);
  EXPECT_EQ(a.find(4), nullptr);
}

TEST(ComposeWord, CharNgramAddIsFastTextSum) {
  // w = word row + sum of the rows of every n-gram of "<where>", 3 <= n <= 6.
  const auto config = [] {
    auto c = parse_run_label("ngram.ww.p-.add");
    c.dim = 4;
    return c;
  }();
  SubwordIndex index(config, Segmenter::char_ngrams(3, 6));
  const auto vocab = build_vocabulary({{"where", "here"}}, 1);
  const auto seqs = index.build(vocab);
  std::mt19937_64 rng(8);
  auto params = ModelParameters::initialize(config, index.subwords().size(), 0, vocab.size(), rng);
  params.subwords = random_matrix(index.subwords().size(), 4, rng);

  std::vector<std::string> keys;
  const std::string w = "<where>";
  for (std::size_t n = 3; n <= 6; ++n) {
    for (std::size_t i = 0; i + n <= w.size(); ++i) keys.push_back(w.substr(i, n));
  }
  keys.push_back("where");
  std::vector<double> want(4, 0.0);
  for (const auto& k : keys) {
    const auto id = index.subwords().find(k);
    ASSERT_GE(id, 0) << k;
    for (std::size_t c = 0; c < 4; ++c) want[c] += params.subwords(static_cast<std::size_t>(id), c);
  }
  const auto got =
      compose_word(seqs[static_cast<std::size_t>(vocab.id("where"))], params, config).word;
  for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(got[c], want[c], 1e-12);
}

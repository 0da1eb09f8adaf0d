#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "spearman_oracle.h"
#include "subword/error.h"
#include "subword/eval.h"

using namespace subword;
namespace t = subword::testing;

TEST(Cosine, BasicValues) {
  const std::vector<double> u{1, 2, 3}, neg{-1, -2, -3}, e1{1, 0, 0}, e2{0, 1, 0}, z{0, 0, 0};
  EXPECT_DOUBLE_EQ(cosine(u, u), 1.0);
  EXPECT_DOUBLE_EQ(cosine(u, neg), -1.0);
  EXPECT_DOUBLE_EQ(cosine(e1, e2), 0.0);
  EXPECT_EQ(cosine(u, z), 0.0);
  const std::vector<double> short_vec{1, 0};
  EXPECT_THROW(cosine(u, short_vec), std::invalid_argument);
}

TEST(Cosine, ScaleInvariant) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> u(7), v(7);
    for (auto& x : u) x = g(rng);
    for (auto& x : v) x = g(rng);
    const double a = std::exp(g(rng)), b = std::exp(g(rng));
    auto su = u, sv = v;
    for (auto& x : su) x *= a;
    for (auto& x : sv) x *= b;
    EXPECT_NEAR(cosine(su, sv), cosine(u, v), 1e-12);
  }
}

TEST(Spearman, IdentityAndReverse) {
  const std::vector<double> g{0.1, 0.5, 0.3, 0.9}, r{0.9, 0.5, 0.7, 0.1};
  EXPECT_DOUBLE_EQ(spearman(g, g), 1.0);
  EXPECT_DOUBLE_EQ(spearman(r, g), -1.0);
}

TEST(Spearman, TiesMatchCountingOracle) {
  const std::vector<double> pred{1, 2, 2, 3}, gold{1, 2, 3, 4};
  EXPECT_EQ(average_ranks(pred), (std::vector<double>{1, 2.5, 2.5, 4}));
  EXPECT_NEAR(spearman(pred, gold), t::pearson_of_ranks(pred, gold), 1e-12);
  // Hand value: ranks (1,2.5,2.5,4) vs (1,2,3,4) -> 4.5 / sqrt(4.5 * 5).
  EXPECT_NEAR(spearman(pred, gold), 4.5 / std::sqrt(4.5 * 5.0), 1e-12);
}

TEST(Spearman, SymmetricAndMonotoneInvariant) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> small(0, 6);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> a(12), b(12);
    for (auto& x : a) x = small(rng);
    for (auto& x : b) x = small(rng) * 0.5;
    a[0] = -1;  // never constant
    b[0] = 10;
    const double rho = spearman(a, b);
    EXPECT_NEAR(rho, spearman(b, a), 1e-12);
    std::vector<double> ea(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) ea[i] = std::exp(a[i]) + 3.0;
    EXPECT_NEAR(rho, spearman(ea, b), 1e-12);
    EXPECT_NEAR(rho, t::pearson_of_ranks(a, b), 1e-12);
  }
}

TEST(Spearman, DegenerateInputs) {
  const std::vector<double> one{1}, flat{2, 2, 2}, ok{1, 2, 3};
  try {
    spearman(one, one);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_STREQ(e.what(), "degenerate ranking");
  }
  EXPECT_THROW(spearman(flat, ok), DataError);
}

namespace {

std::map<std::string, std::vector<double>> hand_embeddings() {
  return {{"cat", {1, 0.2, 0}},   {"dog", {0.9, 0.3, 0.1}}, {"car", {0, 1, 0.2}},
          {"bus", {0.1, 0.9, 0.4}}, {"sun", {0.3, 0.1, 1}}, {"moon", {0.2, 0.3, 0.8}},
          {"tree", {0.5, 0.5, 0.5}}, {"leaf", {0.6, 0.4, 0.5}}, {"red", {-0.4, 0.2, 0.9}},
          {"blue", {-0.3, 0.4, 0.7}}};
}

SimilarityResult run_hand(std::vector<EvalPair>& data) {
  const auto emb = hand_embeddings();
  return evaluate_similarity(
      data,
      [&](std::string_view w) {
        auto it = emb.find(std::string(w));
        return it == emb.end() ? std::vector<double>(3, 0.0) : it->second;
      },
      [&](std::string_view w) { return emb.count(std::string(w)) > 0; });
}

double oracle_rho(const std::vector<EvalPair>& data) {
  const auto emb = hand_embeddings();
  std::vector<double> pred, gold;
  for (const auto& p : data) {
    const auto a = emb.count(p.word_a) ? emb.at(p.word_a) : std::vector<double>(3, 0.0);
    const auto b = emb.count(p.word_b) ? emb.at(p.word_b) : std::vector<double>(3, 0.0);
    pred.push_back(t::cosine_oracle(a, b));
    gold.push_back(p.gold);
  }
  return t::pearson_of_ranks(pred, gold);
}

}  // namespace

TEST(EvaluateSimilarity, TenPairHandEmbeddingsMatchOracle) {
  std::vector<EvalPair> data = {
      {"cat", "dog", 9.1},  {"car", "bus", 8.3},  {"sun", "moon", 7.9}, {"tree", "leaf", 8.8},
      {"red", "blue", 7.0}, {"cat", "car", 1.2},  {"dog", "moon", 0.9}, {"bus", "leaf", 2.5},
      {"sun", "red", 4.4},  {"tree", "cat", 3.1}};
  const auto r = run_hand(data);
  EXPECT_EQ(r.pairs, 10u);
  EXPECT_EQ(r.oov_pairs, 0u);
  EXPECT_NEAR(r.rho, oracle_rho(data), 1e-12);
  EXPECT_GT(r.rho, 0.5);
}

TEST(EvaluateSimilarity, TiedPredictionsAndGoldMatchOracle) {
  std::vector<EvalPair> data = {
      {"cat", "dog", 5}, {"dog", "cat", 5}, {"car", "bus", 7}, {"bus", "car", 6},
      {"sun", "moon", 2}, {"cat", "car", 2}, {"tree", "leaf", 5}, {"red", "blue", 1},
      {"moon", "sun", 3}, {"leaf", "tree", 9}};
  const auto r = run_hand(data);
  EXPECT_NEAR(r.rho, oracle_rho(data), 1e-12);
}

TEST(EvaluateSimilarity, PerfectOrderingGivesOne) {
  std::vector<EvalPair> data = {{"cat", "dog", 0}, {"car", "bus", 0}, {"red", "cat", 0}};
  const auto emb = hand_embeddings();
  for (auto& p : data) p.gold = t::cosine_oracle(emb.at(p.word_a), emb.at(p.word_b));
  EXPECT_DOUBLE_EQ(run_hand(data).rho, 1.0);
}

TEST(EvaluateSimilarity, OovPairsAreScoredNotDropped) {
  std::vector<EvalPair> data = {{"cat", "dog", 9}, {"cat", "zebra", 3}, {"car", "bus", 8},
                                {"sun", "moon", 7}, {"ghost", "phantom", 5}};
  const auto r = run_hand(data);
  EXPECT_EQ(r.pairs, data.size());
  EXPECT_EQ(r.predictions.size(), data.size());
  EXPECT_EQ(r.oov_pairs, 2u);
  EXPECT_FALSE(data[1].oov_a);
  EXPECT_TRUE(data[1].oov_b);
  EXPECT_TRUE(data[4].oov_a && data[4].oov_b);
  EXPECT_EQ(r.predictions[1], 0.0);
  const std::set<std::string> zero(r.zero_vector_words.begin(), r.zero_vector_words.end());
  EXPECT_EQ(zero, (std::set<std::string>{"zebra", "ghost", "phantom"}));
}

TEST(SimilarityDataset, FormatsCommentsAndHeader) {
  std::istringstream tab("# comment\nword1\tword2\tscore\nOld\tNew\t3.5\n\ncat\tDog\t7\n");
  const auto a = load_similarity_dataset(tab);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].word_a, "old");
  EXPECT_EQ(a[1].word_b, "dog");
  EXPECT_DOUBLE_EQ(a[0].gold, 3.5);
  std::istringstream csv("tiger,cat,7.35\nbook,paper,7.46\n");
  EXPECT_EQ(load_similarity_dataset(csv).size(), 2u);
  std::istringstream ws("x y 1\nA1 b 2\n");
  const auto c = load_similarity_dataset(ws);
  EXPECT_EQ(c[1].word_a, "a#");
  std::istringstream bad("a\tb\tzz\nc\td\t1\ne\tf\tnope\n");
  EXPECT_THROW(load_similarity_dataset(bad), DataError);
  std::istringstream two("hot dog\tfood\t5\n");
  EXPECT_THROW(load_similarity_dataset(two), DataError);
  EXPECT_THROW(load_similarity_dataset_file("/nonexistent/sim.txt"), DataError);
}

TEST(PercentileRanks, Definition) {
  const std::vector<double> s{0.3, 0.1, 0.5, 0.3};
  EXPECT_EQ(percentile_ranks(s), (std::vector<double>{0.5, 0.0, 1.0, 0.5}));
  const std::vector<double> one{1};
  EXPECT_THROW(percentile_ranks(one), std::invalid_argument);
}

TEST(PercentageRank, WorkedDelta) {
  const std::vector<double> ranks{0.787, 0.071};
  const Matrix m = delta_matrix(ranks);
  EXPECT_NEAR(m(0, 1), 0.716, 1e-12);
  EXPECT_NEAR(m(1, 0), -0.716, 1e-12);
  EXPECT_EQ(m(0, 0), 0.0);
}

namespace {

struct Fixture {
  ResultsTable table;
  std::vector<DatasetInfo> catalog;
  std::vector<std::string> configs{"sms.ww.p-.add", "sms.w-.pp.add", "bpe.ww.p-.att"};
};

Fixture synthetic_table() {
  Fixture f;
  f.catalog = {{"en-ws", "ws", "en", "fusional"},  {"en-sl", "ws", "en", "fusional"},
               {"de-ws", "ws", "de", "fusional"},  {"de-sl", "ws", "de", "fusional"},
               {"en-rel", "rel", "en", "fusional"}, {"tr-ws", "ws", "tr", "agglutinative"}};
  const std::map<std::string, std::vector<double>> scores = {
      {"en-ws", {0.61, 0.55, 0.40}}, {"en-sl", {0.20, 0.31, 0.31}},
      {"de-ws", {0.44, 0.47, 0.52}}, {"de-sl", {0.10, 0.05, 0.15}},
      {"en-rel", {0.9, 0.1, 0.5}},   {"tr-ws", {0.3, 0.2, 0.1}}};
  for (const auto& [id, s] : scores) {
    for (std::size_t c = 0; c < 3; ++c) f.table.set(f.configs[c], id, s[c]);
  }
  return f;
}

// The three averaging levels written out literally for this fixture.
std::vector<double> oracle_facet_ranks(const Fixture& f, const std::vector<std::string>& facets) {
  const std::map<std::string, std::vector<std::string>> langs = {{"en", {"en-ws", "en-sl"}},
                                                                 {"de", {"de-ws", "de-sl"}}};
  const auto pct = [&](const std::string& id, std::size_t c) {
    const double mine = *f.table.get(f.configs[c], id);
    double less = 0, eq = 0;
    for (std::size_t o = 0; o < 3; ++o) {
      const double v = *f.table.get(f.configs[o], id);
      if (v < mine) less += 1;
      if (o != c && v == mine) eq += 1;
    }
    return (less + eq / 2) / 2.0;
  };
  std::vector<double> out;
  for (const auto& facet : facets) {
    std::vector<std::size_t> members;
    for (std::size_t c = 0; c < 3; ++c) {
      std::set<std::string> tokens;
      std::stringstream ss(f.configs[c]);
      for (std::string tok; std::getline(ss, tok, '.');) tokens.insert(tok);
      std::stringstream fs(facet);
      bool all = true;
      for (std::string tok; std::getline(fs, tok, '.');) all = all && tokens.count(tok);
      if (all) members.push_back(c);
    }
    double over_langs = 0;
    for (const auto& [lang, ids] : langs) {
      double over_configs = 0;
      for (std::size_t c : members) {
        double over_datasets = 0;
        for (const auto& id : ids) over_datasets += pct(id, c);
        over_configs += over_datasets / static_cast<double>(ids.size());
      }
      over_langs += over_configs / static_cast<double>(members.size());
    }
    out.push_back(over_langs / static_cast<double>(langs.size()));
  }
  return out;
}

}  // namespace

TEST(PercentageRank, ThreeLevelAveragingMatchesOracleExactly) {
  const Fixture f = synthetic_table();
  const std::vector<std::string> facets{"sms", "bpe", "ww", "w-", "sms.ww", "add"};
  const auto cmp = percentage_rank_matrix(f.table, f.catalog, {"ws", "fusional", facets, f.configs});
  const auto want = oracle_facet_ranks(f, facets);
  ASSERT_EQ(cmp.ranks.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_EQ(cmp.ranks[i], want[i]) << facets[i];
    for (std::size_t j = 0; j < want.size(); ++j) {
      EXPECT_EQ(cmp.deltas(i, j), want[i] - want[j]);
      EXPECT_EQ(cmp.deltas(i, j), -cmp.deltas(j, i));
    }
    EXPECT_EQ(cmp.deltas(i, i), 0.0);
  }
  // Hand check for "bpe": en (0, 0.75) -> 0.375; de (1, 1) -> 1; mean 0.6875.
  EXPECT_EQ(cmp.ranks[1], 0.6875);
}

TEST(PercentageRank, MissingCellsAreListed) {
  Fixture f = synthetic_table();
  ResultsTable partial;
  for (const auto& c : f.configs) {
    for (const auto& d : f.catalog) {
      if (!(c == "bpe.ww.p-.att" && d.id == "de-sl")) partial.set(c, d.id, *f.table.get(c, d.id));
    }
  }
  try {
    percentage_rank_matrix(partial, f.catalog, {"ws", "fusional", {"sms", "bpe"}, f.configs});
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("(bpe.ww.p-.att, de-sl)"), std::string::npos) << e.what();
  }
  EXPECT_THROW(percentage_rank_matrix(f.table, f.catalog, {"pos", "fusional", {"sms"}, f.configs}),
               DataError);
}

TEST(PercentageRank, FacetMatchingIsTokenwise) {
  EXPECT_TRUE(facet_matches("sms.ww", "sms.ww.pp.add"));
  EXPECT_TRUE(facet_matches("add", "sms.ww.pp.add"));
  EXPECT_FALSE(facet_matches("sms.w-", "sms.ww.pp.add"));
  EXPECT_FALSE(facet_matches("s", "sms.ww.pp.add"));
}

TEST(ResultsTable, CsvRoundTripThroughReport) {
  std::vector<ReportRow> rows = {{"en-ws", "sms.ww.pp.add", 0.5, 2}, {"de-ws", "bpe.w-.p-.att", -0.25, 0}};
  std::ostringstream out;
  write_similarity_report(out, rows);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "dataset,config_label,spearman,oov_pairs");
  std::istringstream in(out.str());
  const auto t = ResultsTable::load_csv(in);
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ(t.get("sms.ww.pp.add", "en-ws"), 0.5);
  EXPECT_EQ(t.get("bpe.w-.p-.att", "de-ws"), -0.25);
  EXPECT_FALSE(t.get("bpe.w-.p-.att", "en-ws").has_value());
  EXPECT_EQ(t.labels(), (std::vector<std::string>{"bpe.w-.p-.att", "sms.ww.pp.add"}));
}

TEST(MatrixGrid, CsvLayout) {
  FacetComparison c;
  c.facets = {"a", "b"};
  c.ranks = {0.75, 0.25};
  c.deltas = delta_matrix(c.ranks);
  std::ostringstream out;
  write_matrix_grid(out, c);
  EXPECT_EQ(out.str(), "facet,a,b\na,0,0.5\nb,-0.5,0\n");
}

TEST(DatasetCatalog, Parses) {
  std::istringstream in("dataset,task,language,language_type\nen-ws,ws,en,fusional\n");
  const auto c = load_dataset_catalog(in);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].language_type, "fusional");
  std::istringstream bad("a,b\n");
  EXPECT_THROW(load_dataset_catalog(bad), DataError);
}

#include "subword/eval.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "subword/corpus.h"
#include "subword/error.h"
#include "subword/text.h"

namespace subword {

namespace {

std::vector<std::string> split_fields(std::string_view line) {
  const char sep = line.find('\t') != std::string_view::npos ? '\t'
                   : line.find(',') != std::string_view::npos ? ','
                                                               : ' ';
  std::vector<std::string> out;
  if (sep == ' ') {
    for (auto f : split_whitespace(line)) out.emplace_back(f);
    return out;
  }
  std::size_t begin = 0;
  while (true) {
    const auto end = line.find(sep, begin);
    auto f = line.substr(begin, end == std::string_view::npos ? line.size() - begin : end - begin);
    while (!f.empty() && (f.front() == ' ' || f.front() == '\r')) f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ' || f.back() == '\r')) f.remove_suffix(1);
    out.emplace_back(f);
    if (end == std::string_view::npos) break;
    begin = end + 1;
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

std::string normalize_word(const std::string& raw, std::size_t line_no) {
  const auto tokens = preprocess_line(raw);
  if (tokens.size() != 1) {
    throw DataError("similarity dataset line " + std::to_string(line_no) +
                    ": expected a single word, got '" + raw + "'");
  }
  return tokens.front();
}

bool is_comment_or_blank(std::string_view line) {
  while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
  return line.empty() || line.front() == '#' || line == "\r";
}

std::vector<std::string> label_tokens(std::string_view label) {
  std::vector<std::string> out;
  std::size_t begin = 0;
  while (true) {
    const auto end = label.find('.', begin);
    out.emplace_back(label.substr(begin, end == std::string_view::npos ? label.npos : end - begin));
    if (end == std::string_view::npos) break;
    begin = end + 1;
  }
  return out;
}

}  // namespace

std::vector<EvalPair> load_similarity_dataset(std::istream& in) {
  std::vector<EvalPair> out;
  std::string line;
  std::size_t line_no = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment_or_blank(line)) continue;
    const auto fields = split_fields(line);
    double score = 0.0;
    if (fields.size() < 3 || !parse_double(fields[2], score)) {
      if (!seen_data && fields.size() >= 3) {
        seen_data = true;  // header
        continue;
      }
      throw DataError("similarity dataset line " + std::to_string(line_no) + ": expected "
                      "word1, word2, score");
    }
    if (!std::isfinite(score)) {
      throw DataError("similarity dataset line " + std::to_string(line_no) + ": non-finite score");
    }
    seen_data = true;
    out.push_back({normalize_word(fields[0], line_no), normalize_word(fields[1], line_no), score,
                   false, false});
  }
  return out;
}

std::vector<EvalPair> load_similarity_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open similarity dataset " + path);
  return load_similarity_dataset(in);
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw std::invalid_argument("cosine: dimension mismatch");
  const double nu = std::sqrt(dot(u, u));
  const double nv = std::sqrt(dot(v, v));
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return dot(u, v) / (nu * nv);
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // positions i..j share ranks i+1..j+1
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> pred, std::span<const double> gold) {
  if (pred.size() != gold.size()) throw std::invalid_argument("spearman: length mismatch");
  const std::size_t n = pred.size();
  if (n < 2) throw DataError("degenerate ranking");
  const auto rx = average_ranks(pred);
  const auto ry = average_ranks(gold);
  const double mean = (static_cast<double>(n) + 1.0) / 2.0;  // of any rank vector
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DataError("degenerate ranking");
  return sxy / std::sqrt(sxx * syy);
}

SimilarityResult evaluate_similarity(std::vector<EvalPair>& dataset, const Embedder& embed,
                                     const KnownWord& known) {
  if (dataset.empty()) throw DataError("empty similarity dataset");
  SimilarityResult res;
  std::vector<double> gold;
  std::set<std::string> zero;
  const auto is_zero = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
  };
  for (EvalPair& p : dataset) {
    p.oov_a = !known(p.word_a);
    p.oov_b = !known(p.word_b);
    const auto va = embed(p.word_a);
    const auto vb = embed(p.word_b);
    if (is_zero(va)) zero.insert(p.word_a);
    if (is_zero(vb)) zero.insert(p.word_b);
    const double c = cosine(va, vb);
    if (!std::isfinite(c)) throw NumericError("non-finite cosine for " + p.word_a + "/" + p.word_b);
    res.predictions.push_back(c);
    gold.push_back(p.gold);
    if (p.oov_a || p.oov_b) ++res.oov_pairs;
  }
  res.pairs = dataset.size();
  res.zero_vector_words.assign(zero.begin(), zero.end());
  res.rho = spearman(res.predictions, gold);
  return res;
}

SimilarityResult evaluate_similarity(std::vector<EvalPair>& dataset, const TrainedModel& model) {
  return evaluate_similarity(
      dataset, [&](std::string_view w) { return model.embed(w); },
      [&](std::string_view w) { return model.vocab.contains(w); });
}

void ResultsTable::set(const std::string& label, const std::string& dataset, double score) {
  scores_[{label, dataset}] = score;
}

std::optional<double> ResultsTable::get(const std::string& label,
                                        const std::string& dataset) const {
  const auto it = scores_.find({label, dataset});
  if (it == scores_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> ResultsTable::labels() const {
  std::vector<std::string> out;
  // Keys are sorted by label first, so equal labels are adjacent.
  for (const auto& [key, v] : scores_) {
    if (out.empty() || out.back() != key.first) out.push_back(key.first);
  }
  return out;
}

ResultsTable ResultsTable::load_csv(std::istream& in) {
  ResultsTable t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment_or_blank(line)) continue;
    const auto f = split_fields(line);
    double score = 0.0;
    if (!f.empty() && f[0] == "dataset") continue;  // header, possibly repeated
    if (f.size() < 3 || !parse_double(f[2], score)) {
      throw DataError("results table line " + std::to_string(line_no) + ": malformed");
    }
    t.set(f[1], f[0], score);
  }
  return t;
}

void write_similarity_report(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << "dataset,config_label,spearman,oov_pairs\n";
  char buf[64];
  for (const auto& r : rows) {
    const auto res = std::to_chars(buf, buf + sizeof buf, r.spearman);
    out << r.dataset << ',' << r.label << ',' << std::string_view(buf, res.ptr - buf) << ','
        << r.oov_pairs << '\n';
  }
}

std::vector<DatasetInfo> load_dataset_catalog(std::istream& in) {
  std::vector<DatasetInfo> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment_or_blank(line)) continue;
    const auto f = split_fields(line);
    if (f.size() < 4) throw DataError("dataset catalog line " + std::to_string(line_no) +
                                      ": expected dataset,task,language,language_type");
    if (line_no == 1 && f[0] == "dataset") continue;
    out.push_back({f[0], f[1], f[2], f[3]});
  }
  return out;
}

std::vector<double> percentile_ranks(std::span<const double> scores) {
  if (scores.size() < 2) throw std::invalid_argument("percentile ranks need >= 2 scores");
  auto r = average_ranks(scores);
  const double denom = static_cast<double>(scores.size() - 1);
  for (double& v : r) v = (v - 1.0) / denom;
  return r;
}

Matrix delta_matrix(std::span<const double> ranks) {
  Matrix m(ranks.size(), ranks.size());
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    for (std::size_t j = 0; j < ranks.size(); ++j) m(i, j) = ranks[i] - ranks[j];
  }
  return m;
}

bool facet_matches(std::string_view facet, std::string_view label) {
  const auto have = label_tokens(label);
  for (const auto& t : label_tokens(facet)) {
    if (std::find(have.begin(), have.end(), t) == have.end()) return false;
  }
  return true;
}

FacetComparison percentage_rank_matrix(const ResultsTable& results,
                                       const std::vector<DatasetInfo>& datasets,
                                       const ComparisonSpec& spec) {
  const std::vector<std::string> configs = spec.configs.empty() ? results.labels() : spec.configs;
  if (configs.size() < 2) throw std::invalid_argument("need at least two configurations");
  if (spec.facets.empty()) throw std::invalid_argument("no facets to compare");

  // language -> datasets of the task within the language type
  std::map<std::string, std::vector<std::string>> by_language;
  for (const auto& d : datasets) {
    if (d.task == spec.task && d.language_type == spec.language_type) {
      by_language[d.language].push_back(d.id);
    }
  }
  if (by_language.empty()) {
    throw DataError("no datasets for task '" + spec.task + "' and language type '" +
                    spec.language_type + "'");
  }

  std::vector<std::string> missing;
  for (const auto& [lang, ids] : by_language) {
    for (const auto& id : ids) {
      for (const auto& c : configs) {
        if (!results.get(c, id)) missing.push_back("(" + c + ", " + id + ")");
      }
    }
  }
  if (!missing.empty()) {
    std::string msg = "missing results:";
    for (const auto& m : missing) msg += " " + m;
    throw DataError(msg);
  }

  // Level 1: per-dataset percentile ranks averaged over each language's datasets.
  std::map<std::string, std::vector<double>> lang_rank;  // language -> rank per config
  for (const auto& [lang, ids] : by_language) {
    std::vector<double> acc(configs.size(), 0.0);
    for (const auto& id : ids) {
      std::vector<double> scores;
      for (const auto& c : configs) scores.push_back(*results.get(c, id));
      const auto r = percentile_ranks(scores);
      for (std::size_t i = 0; i < configs.size(); ++i) acc[i] += r[i];
    }
    for (double& v : acc) v /= static_cast<double>(ids.size());
    lang_rank[lang] = std::move(acc);
  }

  FacetComparison out;
  out.facets = spec.facets;
  for (const auto& facet : spec.facets) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < configs.size(); ++i) {
      if (facet_matches(facet, configs[i])) members.push_back(i);
    }
    if (members.empty()) throw std::invalid_argument("facet '" + facet + "' matches no configuration");
    double total = 0.0;
    for (const auto& [lang, r] : lang_rank) {
      // Level 2: over configurations entailing the facet.
      double s = 0.0;
      for (std::size_t i : members) s += r[i];
      total += s / static_cast<double>(members.size());
    }
    // Level 3: over languages.
    out.ranks.push_back(total / static_cast<double>(lang_rank.size()));
  }
  out.deltas = delta_matrix(out.ranks);
  return out;
}

void write_matrix_grid(std::ostream& out, const FacetComparison& cmp) {
  char buf[64];
  out << "facet";
  for (const auto& f : cmp.facets) out << ',' << f;
  out << '\n';
  for (std::size_t i = 0; i < cmp.facets.size(); ++i) {
    out << cmp.facets[i];
    for (std::size_t j = 0; j < cmp.facets.size(); ++j) {
      const auto res = std::to_chars(buf, buf + sizeof buf, cmp.deltas(i, j));
      out << ',' << std::string_view(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

}  // namespace subword

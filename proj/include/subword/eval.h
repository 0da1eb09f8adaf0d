#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "subword/checkpoint.h"
#include "subword/matrix.h"

namespace subword {

struct EvalPair {
  std::string word_a;
  std::string word_b;
  double gold = 0.0;
  bool oov_a = false;
  bool oov_b = false;
};

// `word1<TAB>word2<TAB>score` (commas accepted), `#` comments and a
// non-numeric header line skipped. Words go through corpus preprocessing.
std::vector<EvalPair> load_similarity_dataset(std::istream& in);
std::vector<EvalPair> load_similarity_dataset_file(const std::string& path);

// 0 when either side is the zero vector.
double cosine(std::span<const double> u, std::span<const double> v);

// 1-based ranks, ties get the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

// Pearson correlation of average ranks. Throws DataError("degenerate
// ranking") for fewer than 2 items or constant ranks.
double spearman(std::span<const double> pred, std::span<const double> gold);

struct SimilarityResult {
  double rho = 0.0;
  std::size_t pairs = 0;
  std::size_t oov_pairs = 0;  // pairs with at least one OOV word
  std::vector<std::string> zero_vector_words;  // no known subword at all
  std::vector<double> predictions;
};

using Embedder = std::function<std::vector<double>(std::string_view)>;
using KnownWord = std::function<bool(std::string_view)>;

// Scores every pair (none are skipped); sets the OOV flags of `dataset`.
SimilarityResult evaluate_similarity(std::vector<EvalPair>& dataset, const Embedder& embed,
                                     const KnownWord& known);
SimilarityResult evaluate_similarity(std::vector<EvalPair>& dataset, const TrainedModel& model);

// Scores keyed by (configuration label, dataset id).
class ResultsTable {
 public:
  void set(const std::string& label, const std::string& dataset, double score);
  std::optional<double> get(const std::string& label, const std::string& dataset) const;
  std::vector<std::string> labels() const;
  std::size_t size() const { return scores_.size(); }

  // CSV `dataset,config_label,spearman,oov_pairs`; extra columns ignored.
  static ResultsTable load_csv(std::istream& in);

 private:
  std::map<std::pair<std::string, std::string>, double> scores_;
};

struct ReportRow {
  std::string dataset;
  std::string label;
  double spearman = 0.0;
  std::size_t oov_pairs = 0;
};
void write_similarity_report(std::ostream& out, const std::vector<ReportRow>& rows);

struct DatasetInfo {
  std::string id;
  std::string task;
  std::string language;
  std::string language_type;
};
// CSV `dataset,task,language,language_type`.
std::vector<DatasetInfo> load_dataset_catalog(std::istream& in);

// (rank - 1) / (n - 1) of each score in ascending order, ties averaged.
std::vector<double> percentile_ranks(std::span<const double> scores);

// M[i][j] = ranks[i] - ranks[j].
Matrix delta_matrix(std::span<const double> ranks);

struct ComparisonSpec {
  std::string task;
  std::string language_type;
  std::vector<std::string> facets;   // e.g. "sms.ww", "bpe.w-"
  std::vector<std::string> configs;  // configurations ranked against each other
};

struct FacetComparison {
  std::vector<std::string> facets;
  std::vector<double> ranks;
  Matrix deltas;
};

// Percentile-ranks every configuration within each dataset, then averages
// over (1) the task's datasets per language, (2) the configurations whose
// label contains every token of the facet, (3) the languages of the
// language type. Throws DataError listing any missing (config, dataset).
FacetComparison percentage_rank_matrix(const ResultsTable& results,
                                       const std::vector<DatasetInfo>& datasets,
                                       const ComparisonSpec& spec);

// Facet rows/columns as CSV with a header row.
void write_matrix_grid(std::ostream& out, const FacetComparison& cmp);

bool facet_matches(std::string_view facet, std::string_view label);

}  // namespace subword

#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "subword/checkpoint.h"
#include "subword/matrix.h"

namespace subword {

// Word vectors in word2vec text layout.
class WordVectors {
 public:
  WordVectors() = default;
  explicit WordVectors(std::size_t dim) : dim_(dim) {}

  void add(std::string word, std::span<const double> vec);
  std::size_t size() const { return words_.size(); }
  std::size_t dim() const { return dim_; }
  const std::string& word(std::size_t i) const { return words_[i]; }
  std::span<const double> vector(std::size_t i) const;
  // Vector of `word`, or nullopt when absent.
  std::optional<std::span<const double>> find(std::string_view word) const;

  // Header `|V| d`, then `word v1 ... vd`; values are written in shortest
  // round-trip form so reading back is exact.
  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static WordVectors load(std::istream& in);
  static WordVectors load_file(const std::string& path);

 private:
  std::vector<std::string> words_;
  std::vector<double> vectors_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t dim_ = 0;
};

// Inference-mode vectors for every vocabulary word, in id order.
WordVectors export_vectors(const TrainedModel& model);

}  // namespace subword

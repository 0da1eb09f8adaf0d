#include "subword/vectors.h"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "subword/error.h"
#include "subword/text.h"

namespace subword {

void WordVectors::add(std::string word, std::span<const double> vec) {
  if (vec.size() != dim_) throw std::invalid_argument("WordVectors::add: dimension mismatch");
  if (index_.count(word)) throw std::invalid_argument("WordVectors::add: duplicate word " + word);
  index_.emplace(word, words_.size());
  words_.push_back(std::move(word));
  vectors_.insert(vectors_.end(), vec.begin(), vec.end());
}

std::span<const double> WordVectors::vector(std::size_t i) const {
  return {vectors_.data() + i * dim_, dim_};
}

std::optional<std::span<const double>> WordVectors::find(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return vector(it->second);
}

void WordVectors::save(std::ostream& out) const {
  out << words_.size() << ' ' << dim_ << '\n';
  char buf[64];
  for (std::size_t i = 0; i < words_.size(); ++i) {
    out << words_[i];
    for (double v : vector(i)) {
      const auto res = std::to_chars(buf, buf + sizeof buf, v);
      out << ' ';
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

void WordVectors::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  save(out);
  if (!out) throw DataError("failed writing " + path);
}

WordVectors WordVectors::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("vector file: missing header");
  std::size_t n = 0, dim = 0;
  {
    std::istringstream header(line);
    if (!(header >> n >> dim) || dim == 0) throw DataError("vector file: bad header '" + line + "'");
  }
  WordVectors wv(dim);
  std::vector<double> vec(dim);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw DataError("vector file: expected " + std::to_string(n) + " rows");
    const auto fields = split_whitespace(line);
    if (fields.size() != dim + 1) {
      throw DataError("vector file: row " + std::to_string(i + 1) + " has " +
                      std::to_string(fields.size() - 1) + " values, expected " +
                      std::to_string(dim));
    }
    for (std::size_t j = 0; j < dim; ++j) {
      const auto& f = fields[j + 1];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), vec[j]);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw DataError("vector file: bad number '" + std::string(f) + "'");
      }
    }
    wv.add(std::string(fields[0]), vec);
  }
  return wv;
}

WordVectors WordVectors::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vector file " + path);
  return load(in);
}

WordVectors export_vectors(const TrainedModel& model) {
  WordVectors wv(static_cast<std::size_t>(model.params.dim));
  for (const auto& e : model.vocab.entries()) wv.add(e.word, model.embed(e.word));
  return wv;
}

}  // namespace subword

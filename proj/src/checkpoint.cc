#include "subword/checkpoint.h"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "subword/error.h"

namespace subword {

namespace {

constexpr char kMagic[8] = {'S', 'W', 'E', 'M', 'B', 'C', 'K', 'P'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void u64(std::uint64_t v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }
  void i64(std::int64_t v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }
  void str(std::string_view s) {
    u64(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void strings(const std::vector<std::string>& v) {
    u64(v.size());
    for (const auto& s : v) str(s);
  }
  void matrix(std::string_view name, const Matrix& m) {
    str(name);
    u64(m.rows());
    u64(m.cols());
    const auto vals = m.values();
    out_.write(reinterpret_cast<const char*>(vals.data()),
               static_cast<std::streamsize>(vals.size() * sizeof(double)));
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void raw(void* dst, std::size_t n) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw DataError("checkpoint truncated");
  }
  std::uint64_t u64() {
    std::uint64_t v;
    raw(&v, sizeof v);
    return v;
  }
  std::int64_t i64() {
    std::int64_t v;
    raw(&v, sizeof v);
    return v;
  }
  std::string str() {
    const auto n = u64();
    if (n > (1ULL << 34)) throw DataError("checkpoint corrupt: oversized string");
    std::string s(n, '\0');
    raw(s.data(), n);
    return s;
  }
  std::vector<std::string> strings() {
    const auto n = u64();
    std::vector<std::string> v;
    v.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n, 1 << 20)));
    for (std::uint64_t i = 0; i < n; ++i) v.push_back(str());
    return v;
  }
  Matrix matrix(std::string_view expected) {
    const auto name = str();
    if (name != expected) {
      throw DataError("checkpoint corrupt: expected matrix " + std::string(expected) + ", found " +
                      name);
    }
    const auto rows = u64();
    const auto cols = u64();
    if (cols != 0 && rows > (1ULL << 36) / cols) throw DataError("checkpoint corrupt: matrix size");
    Matrix m(rows, cols);
    raw(m.values().data(), m.values().size() * sizeof(double));
    return m;
  }

 private:
  std::istream& in_;
};

void write_config(Writer& w, const PipelineConfig& c) {
  w.str(format_config_label(c));
  w.i64(c.heads);
  w.i64(c.attention_hidden);
  w.i64(c.dim);
  w.i64(c.position_cap);
  w.i64(c.add_mean ? 1 : 0);
  w.i64(c.ngram_min);
  w.i64(c.ngram_max);
  w.i64(c.ngram_buckets);
}

PipelineConfig read_config(Reader& r) {
  PipelineConfig c;
  try {
    c = parse_run_label(r.str());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("checkpoint corrupt: ") + e.what());
  }
  c.heads = static_cast<int>(r.i64());
  c.attention_hidden = static_cast<int>(r.i64());
  c.dim = static_cast<int>(r.i64());
  c.position_cap = static_cast<int>(r.i64());
  c.add_mean = r.i64() != 0;
  c.ngram_min = static_cast<int>(r.i64());
  c.ngram_max = static_cast<int>(r.i64());
  c.ngram_buckets = static_cast<std::uint32_t>(r.i64());
  return c;
}

}  // namespace

std::vector<double> TrainedModel::embed(std::string_view word) const {
  return compose_word(index.lookup(word), params, index.config(), false).word;
}

void save_checkpoint(const TrainedModel& model, std::ostream& out) {
  Writer w(out);
  out.write(kMagic, sizeof kMagic);
  w.u64(kVersion);
  write_config(w, model.config());

  w.u64(model.metadata.size());
  for (const auto& [k, v] : model.metadata) {
    w.str(k);
    w.str(v);
  }

  w.i64(model.vocab.total_tokens());
  w.u64(model.vocab.size());
  for (const auto& e : model.vocab.entries()) {
    w.str(e.word);
    w.i64(e.count);
  }

  // Segmenter resources go in their own text interchange formats.
  const Segmenter& seg = model.index.segmenter();
  std::ostringstream merges, lexicon;
  seg.merges().save(merges);
  seg.lexicon().save(lexicon);
  w.str(merges.str());
  w.str(lexicon.str());

  w.strings(model.index.subwords().keys());
  w.strings(model.index.tags().keys());

  const ModelParameters& p = model.params;
  w.i64(p.dim);
  w.matrix("subwords", p.subwords);
  w.matrix("positions", p.positions);
  w.matrix("context", p.context);
  w.matrix("att_hidden", p.att_hidden);
  w.matrix("att_heads", p.att_heads);
  w.matrix("subwords_acc", p.subwords_acc);
  w.matrix("positions_acc", p.positions_acc);
  w.matrix("context_acc", p.context_acc);
  w.matrix("att_hidden_acc", p.att_hidden_acc);
  w.matrix("att_heads_acc", p.att_heads_acc);
  if (!out) throw DataError("failed to write checkpoint");
}

void save_checkpoint_file(const TrainedModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path + " for writing");
  save_checkpoint(model, out);
}

TrainedModel load_checkpoint(std::istream& in) {
  char magic[sizeof kMagic];
  in.read(magic, sizeof magic);
  if (in.gcount() != sizeof magic || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw DataError("not a checkpoint file");
  }
  Reader r(in);
  if (const auto version = r.u64(); version != kVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  const PipelineConfig config = read_config(r);

  std::map<std::string, std::string> metadata;
  for (auto n = r.u64(); n > 0; --n) {
    auto k = r.str();
    metadata[k] = r.str();
  }

  const auto total = r.i64();
  std::vector<Vocabulary::Entry> entries;
  for (auto n = r.u64(); n > 0; --n) {
    auto word = r.str();
    entries.push_back({std::move(word), r.i64()});
  }
  Vocabulary vocab = Vocabulary::from_entries(std::move(entries), total);

  std::istringstream merges_in(r.str());
  std::istringstream lexicon_in(r.str());
  Segmenter segmenter = Segmenter::whole_word();
  switch (config.segmenter) {
    case SegmenterKind::kBpe:
      segmenter = Segmenter::bpe(MergeTable::load(merges_in));
      break;
    case SegmenterKind::kSupervised:
    case SegmenterKind::kUnsupervised:
      segmenter = Segmenter::external(config.segmenter, SegmentationLexicon::load(lexicon_in));
      break;
    case SegmenterKind::kCharNgram:
      segmenter = Segmenter::char_ngrams(config.ngram_min, config.ngram_max, config.ngram_buckets);
      break;
    case SegmenterKind::kWholeWord:
      break;
  }
  KeyTable subwords = KeyTable::from_keys(r.strings());
  KeyTable tags = KeyTable::from_keys(r.strings());

  ModelParameters p;
  p.dim = static_cast<int>(r.i64());
  p.subwords = r.matrix("subwords");
  p.positions = r.matrix("positions");
  p.context = r.matrix("context");
  p.att_hidden = r.matrix("att_hidden");
  p.att_heads = r.matrix("att_heads");
  p.subwords_acc = r.matrix("subwords_acc");
  p.positions_acc = r.matrix("positions_acc");
  p.context_acc = r.matrix("context_acc");
  p.att_hidden_acc = r.matrix("att_hidden_acc");
  p.att_heads_acc = r.matrix("att_heads_acc");

  if (p.dim != config.dim || p.subwords.rows() != subwords.size() ||
      p.context.rows() != vocab.size()) {
    throw DataError("checkpoint corrupt: shapes do not match the stored tables");
  }
  return TrainedModel{std::move(vocab),
                      SubwordIndex(config, std::move(segmenter), std::move(subwords),
                                   std::move(tags)),
                      std::move(p), std::move(metadata)};
}

TrainedModel load_checkpoint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path);
  return load_checkpoint(in);
}

}  // namespace subword

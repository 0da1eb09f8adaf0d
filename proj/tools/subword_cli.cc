// Command-line front end: build-vocab, train-bpe, train, export, eval-sim,
// compare-configs. Exit codes: 0 ok, 1 usage, 2 data error, 3 numeric.

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "subword/bpe.h"
#include "subword/checkpoint.h"
#include "subword/config.h"
#include "subword/corpus.h"
#include "subword/error.h"
#include "subword/eval.h"
#include "subword/pipeline.h"
#include "subword/vectors.h"

namespace fs = std::filesystem;
using namespace subword;

namespace {

constexpr int kUsage = 1;
constexpr int kData = 2;
constexpr int kNumeric = 3;

// Applies `key=value` lines onto options of `cmd` that were not given on the
// command line. Unknown keys are ignored so a run manifest can be fed back.
void apply_config_file(CLI::App& cmd, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw CLI::ConversionError("config line without '=': " + line);
    std::string key = line.substr(first, eq - first);
    std::string value = line.substr(eq + 1);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    const auto vstart = value.find_first_not_of(" \t");
    value = vstart == std::string::npos ? "" : value.substr(vstart);
    if (key == "config") continue;
    CLI::Option* opt = cmd.get_option_no_throw("--" + key);
    if (opt != nullptr && opt->count() == 0) {
      opt->add_result(value);
      opt->run_callback();
    }
  }
}

struct LabelFlags {
  std::string label;
  std::string seg, word_token, tags, pos, comp;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--label", label, "configuration label, e.g. sms.ww.pp.add");
    cmd.add_option("--seg", seg, "sms, morf, bpe, ngram or word");
    cmd.add_option("--word-token", word_token, "w- or ww");
    cmd.add_option("--tags", tags, "off or st");
    cmd.add_option("--pos", pos, "p-, pp or mp");
    cmd.add_option("--comp", comp, "add, att or mtx");
  }

  std::string resolve() const {
    const bool parts = !seg.empty() || !word_token.empty() || !tags.empty() || !pos.empty() ||
                       !comp.empty();
    if (!label.empty()) {
      if (parts) throw CLI::ValidationError("--label", "cannot be combined with component flags");
      return label;
    }
    std::string middle;
    if (tags == "st") {
      if (!pos.empty() && pos != "p-") {
        throw std::invalid_argument("st and position embeddings are mutually exclusive");
      }
      middle = "st";
    } else {
      if (!tags.empty() && tags != "off") throw std::invalid_argument("unknown tag mode " + tags);
      middle = pos.empty() ? "p-" : pos;
    }
    return (seg.empty() ? "bpe" : seg) + "." + (word_token.empty() ? "ww" : word_token) + "." +
           middle + "." + (comp.empty() ? "add" : comp);
  }
};

int cmd_build_vocab(const std::string& corpus, std::int64_t min_count, int workers,
                    const std::string& out) {
  const auto lines = read_corpus_file(corpus);
  Vocabulary vocab;
  try {
    vocab = build_vocabulary(lines, min_count, workers);
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string(e.what()) + " (" + corpus + ")");
  }
  std::ofstream f(out);
  if (!f) throw DataError("cannot open " + out + " for writing");
  vocab.save(f);
  std::cerr << "vocabulary: " << vocab.size() << " words from " << vocab.total_tokens()
            << " tokens -> " << out << '\n';
  return 0;
}

int cmd_train_bpe(const std::string& corpus, std::int64_t min_count, int workers,
                  std::size_t n_merges, const std::string& out) {
  const auto lines = read_corpus_file(corpus);
  Vocabulary vocab;
  try {
    vocab = build_vocabulary(lines, min_count, workers);
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string(e.what()) + " (" + corpus + ")");
  }
  std::vector<std::pair<std::string, std::int64_t>> types;
  for (const auto& e : vocab.entries()) types.emplace_back(e.word, e.count);
  const MergeTable merges = train_bpe(types, n_merges);
  std::ofstream f(out);
  if (!f) throw DataError("cannot open " + out + " for writing");
  merges.save(f);
  std::cerr << "bpe: " << merges.size() << " merges -> " << out << '\n';
  return 0;
}

int cmd_export(const std::string& checkpoint, const std::string& out, const std::string& words) {
  const TrainedModel model = load_checkpoint_file(checkpoint);
  WordVectors vecs = export_vectors(model);
  if (!words.empty()) {
    std::ifstream in(words);
    if (!in) throw DataError("cannot open word list " + words);
    std::string line;
    while (std::getline(in, line)) {
      for (const auto& w : preprocess_line(line)) {
        if (!vecs.find(w)) vecs.add(w, model.embed(w));
      }
    }
  }
  vecs.save_file(out);
  std::cerr << model.label() << ": " << vecs.size() << " vectors -> " << out << '\n';
  return 0;
}

int cmd_eval_sim(const std::string& checkpoint, const std::vector<std::string>& datasets,
                 const std::string& report) {
  const TrainedModel model = load_checkpoint_file(checkpoint);
  const std::string label = model.label();
  std::vector<ReportRow> rows;
  for (const auto& path : datasets) {
    auto pairs = load_similarity_dataset_file(path);
    const SimilarityResult r = evaluate_similarity(pairs, model);
    const std::string id = fs::path(path).stem().string();
    rows.push_back({id, label, r.rho, r.oov_pairs});
    std::cerr << label << " " << id << ": spearman " << r.rho << " over " << r.pairs
              << " pairs, " << r.oov_pairs << " with OOV words";
    if (!r.zero_vector_words.empty()) {
      std::cerr << ", " << r.zero_vector_words.size() << " words without known subwords";
    }
    std::cerr << '\n';
  }
  if (report.empty() || report == "-") {
    write_similarity_report(std::cout, rows);
  } else {
    std::ofstream f(report);
    if (!f) throw DataError("cannot open " + report + " for writing");
    write_similarity_report(f, rows);
  }
  return 0;
}

int cmd_compare(const std::vector<std::string>& results_paths, const std::string& catalog_path,
                ComparisonSpec spec, const std::string& out) {
  // Reports from separate eval-sim runs are concatenated into one table.
  std::stringstream merged;
  for (const auto& p : results_paths) {
    std::ifstream in(p);
    if (!in) throw DataError("cannot open results table " + p);
    merged << in.rdbuf() << '\n';
  }
  const ResultsTable table = ResultsTable::load_csv(merged);
  std::ifstream cat(catalog_path);
  if (!cat) throw DataError("cannot open dataset catalog " + catalog_path);
  const auto datasets = load_dataset_catalog(cat);
  if (spec.facets.empty()) {
    for (const char* seg : {"sms", "morf", "bpe"}) {
      for (const char* wt : {"ww", "w-"}) spec.facets.push_back(std::string(seg) + "." + wt);
    }
  }
  const FacetComparison cmp = percentage_rank_matrix(table, datasets, spec);
  for (std::size_t i = 0; i < cmp.facets.size(); ++i) {
    std::cerr << cmp.facets[i] << " rank " << cmp.ranks[i] << '\n';
  }
  if (out.empty() || out == "-") {
    write_matrix_grid(std::cout, cmp);
  } else {
    std::ofstream f(out);
    if (!f) throw DataError("cannot open " + out + " for writing");
    write_matrix_grid(f, cmp);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subword-informed word embeddings: train, export, evaluate."};
  app.require_subcommand(1);

  // build-vocab
  auto* bv = app.add_subcommand("build-vocab", "count words and write the vocabulary");
  std::string bv_corpus, bv_out, bv_config;
  std::int64_t bv_min = 5;
  int bv_workers = 1;
  bv->add_option("--corpus", bv_corpus, "corpus, one sentence per line");
  bv->add_option("--min-count", bv_min, "minimum word frequency")->capture_default_str();
  bv->add_option("--workers", bv_workers, "counting threads")->capture_default_str();
  bv->add_option("--out", bv_out, "vocabulary file (word<TAB>count)");
  bv->add_option("--config", bv_config, "key=value defaults");

  // train-bpe
  auto* tb = app.add_subcommand("train-bpe", "learn a BPE merge table from a corpus");
  std::string tb_corpus, tb_out, tb_config;
  std::int64_t tb_min = 5;
  int tb_workers = 1;
  std::size_t tb_merges = 10000;
  tb->add_option("--corpus", tb_corpus);
  tb->add_option("--min-count", tb_min)->capture_default_str();
  tb->add_option("--workers", tb_workers)->capture_default_str();
  tb->add_option("--bpe-merges", tb_merges, "number of merge operations")->capture_default_str();
  tb->add_option("--out", tb_out, "merge table file");
  tb->add_option("--config", tb_config, "key=value defaults");

  // train
  auto* tr = app.add_subcommand("train", "train one configuration end to end");
  RunManifest m;
  LabelFlags flags;
  std::string tr_config, out_dir = ".";
  flags.add_to(*tr);
  tr->add_option("--corpus", m.corpus, "corpus, one sentence per line");
  tr->add_option("--lexicon", m.lexicon, "segmentation lexicon (sms/morf)");
  tr->add_option("--merges", m.merges, "BPE merge table; learnt from the corpus if absent");
  tr->add_option("--bpe-merges", m.bpe_merges)->capture_default_str();
  tr->add_option("--min-count", m.min_count)->capture_default_str();
  tr->add_option("--dim", m.pipeline.dim)->capture_default_str();
  tr->add_option("--heads", m.pipeline.heads, "attention heads for mtx")->capture_default_str();
  tr->add_option("--attention-hidden", m.pipeline.attention_hidden)->capture_default_str();
  tr->add_option("--position-cap", m.pipeline.position_cap)->capture_default_str();
  tr->add_flag("--add-mean", m.pipeline.add_mean, "average instead of sum for add");
  tr->add_option("--ngram-min", m.pipeline.ngram_min)->capture_default_str();
  tr->add_option("--ngram-max", m.pipeline.ngram_max)->capture_default_str();
  tr->add_option("--ngram-buckets", m.pipeline.ngram_buckets, "0 disables hashing")
      ->capture_default_str();
  tr->add_option("--epochs", m.train.epochs)->capture_default_str();
  tr->add_option("--window", m.train.window)->capture_default_str();
  tr->add_option("--negatives", m.train.negatives)->capture_default_str();
  tr->add_option("--subsample", m.train.subsample_t)->capture_default_str();
  auto* lr_opt = tr->add_option("--lr", m.train.lr0, "initial rate (default 0.05, morf 0.075)");
  tr->add_option("--batch-size", m.train.batch_size)->capture_default_str();
  tr->add_option("--seed", m.train.seed)->capture_default_str();
  tr->add_option("--workers", m.train.workers)->capture_default_str();
  tr->add_option("--out-dir", out_dir, "directory for artifacts without an explicit path")
      ->capture_default_str();
  tr->add_option("--checkpoint", m.checkpoint_out);
  tr->add_option("--vectors", m.vectors_out);
  tr->add_option("--manifest", m.manifest_out);
  tr->add_option("--config", tr_config, "key=value file (a run manifest works); flags win");

  // export
  auto* ex = app.add_subcommand("export", "write word2vec text vectors from a checkpoint");
  std::string ex_ckpt, ex_out, ex_words, ex_config;
  ex->add_option("--checkpoint", ex_ckpt);
  ex->add_option("--out", ex_out);
  ex->add_option("--words", ex_words, "extra words to compose and append");
  ex->add_option("--config", ex_config, "key=value defaults");

  // eval-sim
  auto* ev = app.add_subcommand("eval-sim", "Spearman correlation on similarity datasets");
  std::string ev_ckpt, ev_report, ev_config;
  std::vector<std::string> ev_data;
  ev->add_option("--checkpoint", ev_ckpt);
  ev->add_option("--dataset", ev_data, "word1<TAB>word2<TAB>score files");
  ev->add_option("--report", ev_report, "CSV report path (default stdout)");
  ev->add_option("--config", ev_config, "key=value defaults");

  // compare-configs
  auto* cc = app.add_subcommand("compare-configs", "percentage-rank comparison matrix");
  std::vector<std::string> cc_results;
  std::string cc_catalog, cc_out, cc_config;
  ComparisonSpec spec;
  cc->add_option("--results", cc_results, "CSV dataset,config_label,spearman[,oov_pairs]");
  cc->add_option("--catalog", cc_catalog, "CSV dataset,task,language,language_type");
  cc->add_option("--task", spec.task);
  cc->add_option("--language-type", spec.language_type);
  cc->add_option("--facet", spec.facets, "facets to compare (default seg.wordtoken)");
  cc->add_option("--configs", spec.configs, "configurations ranked (default all in results)");
  cc->add_option("--out", cc_out, "grid CSV path (default stdout)");
  cc->add_option("--config", cc_config, "key=value defaults");

  try {
    app.parse(argc, argv);
    // Required options are checked after the config file is applied, since
    // the file may supply them.
    const auto apply = [](CLI::App& cmd, const std::string& cfg,
                          std::initializer_list<const char*> required) {
      if (!cfg.empty()) apply_config_file(cmd, cfg);
      for (const char* name : required) {
        if (cmd.get_option(name)->count() == 0) throw CLI::RequiredError(name);
      }
    };
    if (bv->parsed()) {
      apply(*bv, bv_config, {"--corpus", "--out"});
      return cmd_build_vocab(bv_corpus, bv_min, bv_workers, bv_out);
    }
    if (tb->parsed()) {
      apply(*tb, tb_config, {"--corpus", "--out"});
      return cmd_train_bpe(tb_corpus, tb_min, tb_workers, tb_merges, tb_out);
    }
    if (tr->parsed()) {
      apply(*tr, tr_config, {"--corpus"});
      m.lr_explicit = lr_opt->count() > 0;
      m.label = flags.resolve();
      const std::string label = format_config_label(parse_run_label(m.label));
      const auto artifact = [&](std::string& path, const char* ext) {
        if (path.empty()) path = (fs::path(out_dir) / (label + ext)).string();
      };
      artifact(m.checkpoint_out, ".ckpt");
      artifact(m.vectors_out, ".vec");
      artifact(m.manifest_out, ".manifest");
      if (!out_dir.empty()) fs::create_directories(out_dir);
      run_pipeline(m, &std::cerr);
      std::cerr << label << ": wrote " << m.checkpoint_out << ", " << m.vectors_out << ", "
                << m.manifest_out << '\n';
      return 0;
    }
    if (ex->parsed()) {
      apply(*ex, ex_config, {"--checkpoint", "--out"});
      return cmd_export(ex_ckpt, ex_out, ex_words);
    }
    if (ev->parsed()) {
      apply(*ev, ev_config, {"--checkpoint", "--dataset"});
      return cmd_eval_sim(ev_ckpt, ev_data, ev_report);
    }
    if (cc->parsed()) {
      apply(*cc, cc_config, {"--results", "--catalog", "--task", "--language-type"});
      return cmd_compare(cc_results, cc_catalog, spec, cc_out);
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}

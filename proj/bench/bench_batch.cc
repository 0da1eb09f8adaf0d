// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include <fstream>
#include <random>

#include "subword/batch_kernels.h"
#include "subword/corpus.h"
#include "subword/pipeline.h"
#include "subword/sgns.h"

using namespace subword;

namespace {

struct Workload {
  Vocabulary vocab;
  std::vector<std::vector<std::string>> lines;
  std::vector<std::vector<WordId>> sentences;
  PipelineConfig config;
  std::vector<SubwordSequence> sequences;
  ModelParameters params;
  Batch batch;
};

const std::vector<std::vector<std::string>>& corpus() {
  static const auto lines = read_corpus_file(SUBWORD_BENCH_CORPUS);
  return lines;
}

Workload make_workload(const std::string& label) {
  Workload w;
  w.lines = corpus();
  w.vocab = build_vocabulary(w.lines, 5);
  w.sentences = encode_corpus(w.lines, w.vocab);
  w.config = parse_config_label(label);
  w.config.dim = 100;
  SubwordIndex index(w.config, build_segmenter(w.config, SegmenterResources{"", "", 2000}, w.vocab));
  w.sequences = index.build(w.vocab);
  Rng rng(1);
  w.params = ModelParameters::initialize(w.config, index.subwords().size(), index.position_rows(),
                                         w.vocab.size(), rng);
  const NegativeTable noise(w.vocab);
  w.batch.negatives_per_pair = 5;
  for (const auto& s : w.sentences) {
    for (const auto& p : generate_pairs(s, 5, rng)) {
      if (w.batch.size() == 1024) break;
      w.batch.pairs.push_back(p);
      for (int k = 0; k < 5; ++k) w.batch.negatives.push_back(noise.sample_excluding(rng, p.context));
    }
    if (w.batch.size() == 1024) break;
  }
  return w;
}

const char* kLabels[] = {"bpe.ww.p-.add", "bpe.ww.pp.att", "bpe.ww.mp.mtx"};

Workload& workload(std::int64_t which) {
  static std::vector<Workload> all = [] {
    std::vector<Workload> v;
    for (const char* l : kLabels) v.push_back(make_workload(l));
    return v;
  }();
  return all[static_cast<std::size_t>(which)];
}

void BM_BatchGradientSerial(benchmark::State& state) {
  Workload& w = workload(state.range(0));
  GradientBuffer out;
  for (auto _ : state) {
    benchmark::DoNotOptimize(batch_gradient_serial(w.batch, w.sequences, w.params, w.config, out));
  }
  state.SetLabel(kLabels[state.range(0)]);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.batch.size()));
}

void BM_BatchGradientParallel(benchmark::State& state) {
  Workload& w = workload(state.range(0));
  GradientBuffer out;
  std::vector<GradientBuffer> scratch;
  const int workers = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        batch_gradient_parallel(w.batch, w.sequences, w.params, w.config, workers, scratch, out));
  }
  state.SetLabel(std::string(kLabels[state.range(0)]) + " workers=" + std::to_string(workers));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.batch.size()));
}

void BM_CountWordsSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(count_words_serial(corpus()).total_tokens);
}

void BM_CountWordsParallel(benchmark::State& state) {
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(count_words_parallel(corpus(), workers).total_tokens);
  }
}

}  // namespace

BENCHMARK(BM_BatchGradientSerial)->DenseRange(0, 2)->UseRealTime()->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_BatchGradientParallel)
    ->ArgsProduct({{0, 1, 2}, {2, 4}})
    ->UseRealTime()
    ->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_CountWordsSerial)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CountWordsParallel)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "subword/corpus.h"
#include "subword/segmentation.h"

namespace subword::testing {

// Stand-in for external segmenter output: strips one known prefix and one
// known suffix when a root of at least three letters remains.
// "dishonestly" -> (dis, honest, ly) tagged (prefix, root, suffix).
SegmentationLexicon affix_lexicon_tagged(const std::vector<std::string>& words);
// Suffix-only split without tags. "dishonestly" -> (dishonest, ly).
SegmentationLexicon affix_lexicon_untagged(const std::vector<std::string>& words);

std::vector<std::string> vocabulary_words(const Vocabulary& vocab);

std::string data_dir();
// Public-domain sample corpus bundled with the repository (~100k tokens).
std::vector<std::vector<std::string>> sample_corpus();
// Leading lines of the sample corpus totalling at least `tokens` tokens.
std::vector<std::vector<std::string>> sample_prefix(std::int64_t tokens);

// `n` sentences over a `vocab`-word alphabet w0..w{vocab-1} with a skewed
// unigram and local co-occurrence structure.
std::vector<std::vector<std::string>> toy_corpus(int n, int vocab, std::uint64_t seed);

std::string temp_path(const std::string& name);

// Index for `config` over `vocab`: affix lexicons stand in for the external
// segmenters (tagged for sms, untagged for morf), BPE is learnt from the
// vocabulary.
SubwordIndex index_for(const PipelineConfig& config, const Vocabulary& vocab,
                       std::size_t bpe_merges = 500);

}  // namespace subword::testing

#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "subword/config.h"
#include "subword/corpus.h"
#include "subword/model.h"
#include "subword/segmentation.h"

namespace subword {

// Everything needed to compose vectors for arbitrary words after training.
struct TrainedModel {
  Vocabulary vocab;
  SubwordIndex index;
  ModelParameters params;
  std::map<std::string, std::string> metadata;  // label, seed, hyperparameters

  const PipelineConfig& config() const { return index.config(); }
  std::string label() const { return format_config_label(index.config()); }

  // Inference-mode word vector; in-vocabulary and OOV words go through the
  // same composition. All-unknown words give the zero vector.
  std::vector<double> embed(std::string_view word) const;
};

// Binary container: magic, version, config, metadata, vocabulary,
// segmenter resources, key tables and every matrix with its shape.
void save_checkpoint(const TrainedModel& model, std::ostream& out);
void save_checkpoint_file(const TrainedModel& model, const std::string& path);
TrainedModel load_checkpoint(std::istream& in);
TrainedModel load_checkpoint_file(const std::string& path);

}  // namespace subword

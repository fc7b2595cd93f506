#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "codemix/augment.hpp"
#include "codemix/corpus.hpp"
#include "codemix/model.hpp"
#include "codemix/synthetic.hpp"
#include "codemix/training.hpp"

namespace codemix {

// Full run configuration; defaults are the best-performing settings
// (BiLSTM, 32 units, 100-d embeddings, max length 200, lr 0.01, recurrent
// dropout 0.2). Loaded from a JSON file, overridden by CLI flags, validated
// field by field before any stage runs.
struct RunConfig {
  DatasetFormat data;

  struct Resources {
    std::string stopwords;
    std::string dictionary;
    std::string synonyms;
  } resources;

  struct Split {
    double test_fraction = 0.22;
    std::uint64_t seed = 13;
  } split;

  AugmentConfig augment;

  struct Embeddings {
    std::string path;  // empty: random-initialized, trainable
    int min_frequency = 1;
  } embeddings;

  ModelConfig model;
  std::string precision = "f32";  // f32 | f64

  TrainingSchedule schedule;
  double val_fraction = 0.15;  // carved from the train set when no val file

  SyntheticSpec synthetic;

  void validate() const;

  // Fingerprint of the semantic configuration. File-path fields are
  // excluded so identical runs in different directories hash identically.
  std::string config_hash() const;

  nlohmann::json to_json(bool include_paths = true) const;
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::string& path);

  // Fills every stage seed from one master seed.
  void set_master_seed(std::uint64_t seed);
};

}  // namespace codemix

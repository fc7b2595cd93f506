#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "codemix/model.hpp"
#include "codemix/training.hpp"

namespace codemix {

// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
  std::array<std::array<long, kNumClasses>, kNumClasses> counts{};

  long total() const {
    long t = 0;
    for (const auto& row : counts) {
      for (long c : row) t += c;
    }
    return t;
  }
  long trace() const {
    long t = 0;
    for (int i = 0; i < kNumClasses; ++i) t += counts[i][i];
    return t;
  }
  long row_sum(int r) const {
    long t = 0;
    for (long c : counts[r]) t += c;
    return t;
  }
  long col_sum(int c) const {
    long t = 0;
    for (int r = 0; r < kNumClasses; ++r) t += counts[r][c];
    return t;
  }
};

// A zero denominator yields metric 0 with the matching *_defined flag
// cleared; F1 is 0 when precision and recall are both 0.
struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_defined = true;
  bool recall_defined = true;
  long support = 0;
};

struct MetricsReport {
  std::array<ClassMetrics, kNumClasses> per_class;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  ConfusionMatrix confusion;
  std::string model_descriptor;
  std::string config_hash;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  static MetricsReport from_json(const nlohmann::json& j);
  std::string render_text(const LabelNames& labels = {}) const;
};

MetricsReport metrics_from_confusion(const ConfusionMatrix& confusion,
                                     const std::string& model_descriptor = "",
                                     const std::string& config_hash = "",
                                     std::uint64_t seed = 0);

// Micro-averaged recall: pooled true positives over pooled actual positives.
double micro_recall(const ConfusionMatrix& confusion);

template <typename Scalar>
MetricsReport evaluate(const Model<Scalar>& model,
                       const EncodedDataset& test_set) {
  if (test_set.empty()) throw DataError("evaluation set is empty");
  if (test_set.sequences.size() != test_set.labels.size()) {
    throw DataError("dataset sequences and labels differ in length");
  }
  ConfusionMatrix confusion;
  for (std::size_t i = 0; i < test_set.size(); ++i) {
    auto [predicted, probs] = predict(model, test_set.sequences[i]);
    confusion.counts[label_index(test_set.labels[i])]
                    [label_index(predicted)] += 1;
  }
  return metrics_from_confusion(confusion, model.config.descriptor(),
                                model.meta.config_hash, model.meta.seed);
}

// Comparison of runs: one row per report, best value per metric column
// flagged (ties go to the first row listed).
struct ComparisonTable {
  std::vector<std::string> columns;           // first column is the model
  std::vector<std::vector<std::string>> rows;
  std::vector<std::vector<double>> values;    // numeric cells per row
  std::vector<int> best_row;                  // per numeric column

  std::string render_text() const;
  std::string render_delimited(char delimiter = '\t') const;
};

ComparisonTable compare_runs(const std::vector<MetricsReport>& reports);

}  // namespace codemix

#include "codemix/evaluate.hpp"

#include <cstdio>
#include <sstream>

namespace codemix {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

MetricsReport metrics_from_confusion(const ConfusionMatrix& confusion,
                                     const std::string& model_descriptor,
                                     const std::string& config_hash,
                                     std::uint64_t seed) {
  MetricsReport report;
  report.confusion = confusion;
  report.model_descriptor = model_descriptor;
  report.config_hash = config_hash;
  report.seed = seed;

  const long total = confusion.total();
  report.accuracy =
      total > 0 ? static_cast<double>(confusion.trace()) / total : 0.0;

  double f1_sum = 0.0;
  for (int c = 0; c < kNumClasses; ++c) {
    ClassMetrics& m = report.per_class[c];
    const long tp = confusion.counts[c][c];
    const long predicted = confusion.col_sum(c);
    const long actual = confusion.row_sum(c);
    m.support = actual;
    if (predicted > 0) {
      m.precision = static_cast<double>(tp) / predicted;
    } else {
      m.precision = 0.0;
      m.precision_defined = false;
    }
    if (actual > 0) {
      m.recall = static_cast<double>(tp) / actual;
    } else {
      m.recall = 0.0;
      m.recall_defined = false;
    }
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    f1_sum += m.f1;
  }
  report.macro_f1 = f1_sum / kNumClasses;
  return report;
}

double micro_recall(const ConfusionMatrix& confusion) {
  long tp = 0;
  long actual = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    tp += confusion.counts[c][c];
    actual += confusion.row_sum(c);
  }
  return actual > 0 ? static_cast<double>(tp) / actual : 0.0;
}

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json j;
  j["model"] = model_descriptor;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["accuracy"] = accuracy;
  j["macro_f1"] = macro_f1;
  nlohmann::json classes = nlohmann::json::array();
  LabelNames labels;
  for (int c = 0; c < kNumClasses; ++c) {
    const ClassMetrics& m = per_class[c];
    classes.push_back({{"label", labels.names[c]},
                       {"precision", m.precision},
                       {"recall", m.recall},
                       {"f1", m.f1},
                       {"precision_defined", m.precision_defined},
                       {"recall_defined", m.recall_defined},
                       {"support", m.support}});
  }
  j["per_class"] = std::move(classes);
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < kNumClasses; ++r) {
    rows.push_back(confusion.counts[r]);
  }
  j["confusion"] = std::move(rows);
  return j;
}

MetricsReport MetricsReport::from_json(const nlohmann::json& j) {
  MetricsReport report;
  report.model_descriptor = j.at("model").get<std::string>();
  report.config_hash = j.at("config_hash").get<std::string>();
  report.seed = j.at("seed").get<std::uint64_t>();
  report.accuracy = j.at("accuracy").get<double>();
  report.macro_f1 = j.at("macro_f1").get<double>();
  const auto& classes = j.at("per_class");
  for (int c = 0; c < kNumClasses; ++c) {
    const auto& m = classes.at(c);
    report.per_class[c].precision = m.at("precision").get<double>();
    report.per_class[c].recall = m.at("recall").get<double>();
    report.per_class[c].f1 = m.at("f1").get<double>();
    report.per_class[c].precision_defined =
        m.at("precision_defined").get<bool>();
    report.per_class[c].recall_defined = m.at("recall_defined").get<bool>();
    report.per_class[c].support = m.at("support").get<long>();
  }
  const auto& rows = j.at("confusion");
  for (int r = 0; r < kNumClasses; ++r) {
    for (int c = 0; c < kNumClasses; ++c) {
      report.confusion.counts[r][c] = rows.at(r).at(c).get<long>();
    }
  }
  return report;
}

std::string MetricsReport::render_text(const LabelNames& labels) const {
  std::ostringstream out;
  out << "model: " << model_descriptor << "\n";
  out << "config_hash: " << config_hash << "  seed: " << seed << "\n";
  out << "accuracy: " << fmt(accuracy) << "  macro_f1: " << fmt(macro_f1)
      << "\n\n";
  out << "class            precision  recall    f1        support\n";
  for (int c = 0; c < kNumClasses; ++c) {
    const ClassMetrics& m = per_class[c];
    char line[128];
    std::snprintf(line, sizeof(line), "%-16s %-10s %-9s %-9s %ld\n",
                  labels.names[c].c_str(),
                  (fmt(m.precision) + (m.precision_defined ? "" : "*")).c_str(),
                  (fmt(m.recall) + (m.recall_defined ? "" : "*")).c_str(),
                  fmt(m.f1).c_str(), m.support);
    out << line;
  }
  out << "\nconfusion (rows true, cols predicted):\n";
  for (int r = 0; r < kNumClasses; ++r) {
    for (int c = 0; c < kNumClasses; ++c) {
      out << confusion.counts[r][c] << (c + 1 < kNumClasses ? "\t" : "\n");
    }
  }
  out << "* zero-denominator metric reported as 0\n";
  return out.str();
}

ComparisonTable compare_runs(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw DataError("compare_runs needs at least 1 report");
  ComparisonTable table;
  table.columns = {"model",   "accuracy", "macro_f1", "P(non)", "R(non)",
                   "F1(non)", "P(off)",   "R(off)",   "F1(off)", "P(hate)",
                   "R(hate)", "F1(hate)"};
  for (const auto& r : reports) {
    std::vector<double> values = {r.accuracy, r.macro_f1};
    for (int c = 0; c < kNumClasses; ++c) {
      values.push_back(r.per_class[c].precision);
      values.push_back(r.per_class[c].recall);
      values.push_back(r.per_class[c].f1);
    }
    std::vector<std::string> row = {r.model_descriptor};
    for (double v : values) row.push_back(fmt(v));
    table.rows.push_back(std::move(row));
    table.values.push_back(std::move(values));
  }
  const std::size_t metric_count = table.values.front().size();
  table.best_row.assign(metric_count, 0);
  for (std::size_t m = 0; m < metric_count; ++m) {
    for (std::size_t i = 1; i < table.values.size(); ++i) {
      if (table.values[i][m] > table.values[table.best_row[m]][m]) {
        table.best_row[m] = static_cast<int>(i);
      }
    }
  }
  return table;
}

std::string ComparisonTable::render_text() const {
  std::ostringstream out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out << columns[c] << (c + 1 < columns.size() ? "\t" : "\n");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < rows[i].size(); ++c) {
      out << rows[i][c];
      if (c > 0 && best_row[c - 1] == static_cast<int>(i)) out << "*";
      out << (c + 1 < rows[i].size() ? "\t" : "\n");
    }
  }
  out << "(* best per column)\n";
  return out.str();
}

std::string ComparisonTable::render_delimited(char delimiter) const {
  std::ostringstream out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out << columns[c] << (c + 1 < columns.size() ? delimiter : '\n');
  }
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << row[c] << (c + 1 < row.size() ? delimiter : '\n');
    }
  }
  return out.str();
}

}  // namespace codemix

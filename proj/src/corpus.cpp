#include "codemix/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "codemix/rng.hpp"

namespace codemix {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Splits one line into fields. With a comma delimiter, fields follow CSV
// quoting: a field may be wrapped in double quotes, with "" as an escaped
// quote. Any other delimiter splits verbatim.
std::vector<std::string> split_fields(const std::string& line, char delim) {
  std::vector<std::string> fields;
  if (delim != ',') {
    std::size_t start = 0;
    while (true) {
      std::size_t pos = line.find(delim, start);
      if (pos == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, pos - start));
      start = pos + 1;
    }
    return fields;
  }
  std::string field;
  bool quoted = false;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
    ++i;
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string csv_quote(const std::string& s, char delim) {
  if (delim == ',') {
    if (s.find_first_of(",\"\n\r") != std::string::npos) {
      std::string out = "\"";
      for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
      }
      out.push_back('"');
      return out;
    }
    return s;
  }
  // Non-comma delimiters have no quoting; control characters and the
  // delimiter itself are flattened to spaces.
  std::string out = s;
  for (char& c : out) {
    if (c == delim || c == '\n' || c == '\r' || c == '\t') c = ' ';
  }
  return out;
}

std::string generated_id(std::size_t ordinal) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "r%06zu", ordinal);
  return buf;
}

Origin parse_origin(const std::string& field, std::size_t line_no) {
  if (field == "original" || field.empty()) return {};
  const std::string prefix = "augmented:";
  if (field.rfind(prefix, 0) == 0 && field.size() > prefix.size()) {
    return Origin{true, field.substr(prefix.size())};
  }
  throw DataError("line " + std::to_string(line_no) + ": bad origin field '" +
                  field + "'");
}

std::string origin_string(const Origin& o) {
  return o.augmented ? "augmented:" + o.source_id : "original";
}

}  // namespace

ClassLabel label_from_index(int i) {
  if (i < 0 || i >= kNumClasses) {
    throw DataError("class index out of range: " + std::to_string(i));
  }
  return static_cast<ClassLabel>(i);
}

std::optional<ClassLabel> LabelNames::parse(const std::string& s) const {
  for (int i = 0; i < kNumClasses; ++i) {
    if (names[i] == s) return static_cast<ClassLabel>(i);
  }
  return std::nullopt;
}

void LabeledCorpus::append(MessageRecord record) {
  if (trim(record.text).empty()) {
    throw DataError("record '" + record.id + "': empty text");
  }
  if (ids_.count(record.id)) {
    throw DataError("duplicate record id '" + record.id + "'");
  }
  if (record.origin.augmented) {
    auto it = ids_.find(record.origin.source_id);
    if (it == ids_.end() || records_[it->second].origin.augmented) {
      throw DataError("augmented record '" + record.id +
                      "' references unknown original '" +
                      record.origin.source_id + "'");
    }
  }
  ids_.emplace(record.id, records_.size());
  counts_[label_index(record.label)] += 1;
  records_.push_back(std::move(record));
}

ClassCounts class_distribution(const LabeledCorpus& corpus) {
  ClassCounts counts{};
  for (const auto& r : corpus.records()) counts[label_index(r.label)] += 1;
  return counts;
}

LabeledCorpus load_dataset(const std::string& path,
                           const DatasetFormat& format) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file: " + path);

  LabeledCorpus corpus;
  std::string line;
  std::size_t line_no = 0;
  bool header_skipped = !format.has_header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_skipped) {
      header_skipped = true;
      continue;
    }
    auto fields = split_fields(line, format.delimiter);
    if (fields.size() < 2) {
      throw DataError("line " + std::to_string(line_no) +
                      ": expected at least 2 columns (label, text)");
    }
    auto label = format.labels.parse(trim(fields[0]));
    if (!label) {
      throw DataError("line " + std::to_string(line_no) + ": unknown label '" +
                      trim(fields[0]) + "'");
    }
    MessageRecord rec;
    rec.label = *label;
    rec.text = fields[1];
    if (trim(rec.text).empty()) {
      throw DataError("line " + std::to_string(line_no) + ": empty text");
    }
    rec.id = fields.size() >= 3 && !trim(fields[2]).empty()
                 ? trim(fields[2])
                 : generated_id(corpus.size() + 1);
    if (fields.size() >= 4) rec.origin = parse_origin(trim(fields[3]), line_no);
    try {
      corpus.append(std::move(rec));
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(line_no) + ": " +
                      std::string(e.what()));
    }
  }
  if (corpus.empty()) throw DataError("empty dataset: " + path);
  return corpus;
}

void save_dataset(const LabeledCorpus& corpus, const std::string& path,
                  const DatasetFormat& format,
                  const std::optional<FileProvenance>& provenance) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write dataset file: " + path);
  if (provenance) {
    out << "# config_hash=" << provenance->config_hash
        << " seed=" << provenance->seed << "\n";
  }
  const char d = format.delimiter;
  for (const auto& r : corpus.records()) {
    out << csv_quote(format.labels.of(r.label), d) << d
        << csv_quote(r.text, d) << d << csv_quote(r.id, d) << d
        << csv_quote(origin_string(r.origin), d) << "\n";
  }
  if (!out) throw DataError("write failed: " + path);
}

namespace {

SplitResult split_with_counts(const LabeledCorpus& corpus,
                              const ClassCounts& test_counts,
                              std::uint64_t seed) {
  // Per class, shuffle the record positions and mark the first k as test.
  std::vector<bool> is_test(corpus.size(), false);
  for (int c = 0; c < kNumClasses; ++c) {
    std::vector<std::size_t> positions;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      if (label_index(corpus.at(i).label) == c) positions.push_back(i);
    }
    if (test_counts[c] > positions.size()) {
      throw DataError("test count exceeds class size for class " +
                      std::to_string(c));
    }
    SeededRng rng(derive_seed(seed, "stratified-split", c));
    rng.shuffle(positions);
    for (std::size_t k = 0; k < test_counts[c]; ++k) {
      is_test[positions[k]] = true;
    }
  }
  SplitResult result;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    (is_test[i] ? result.test : result.train).append(corpus.at(i));
  }
  return result;
}

}  // namespace

SplitResult stratified_split(const LabeledCorpus& corpus, double test_fraction,
                             std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test_fraction must be in (0, 1)");
  }
  ClassCounts counts = corpus.counts();
  ClassCounts test_counts{};
  for (int c = 0; c < kNumClasses; ++c) {
    if (counts[c] < 2) {
      throw DataError("class " + std::to_string(c) + " has " +
                      std::to_string(counts[c]) +
                      " records; stratified split needs at least 2");
    }
    // Round half up.
    test_counts[c] = static_cast<std::size_t>(
        std::floor(test_fraction * static_cast<double>(counts[c]) + 0.5));
  }
  return split_with_counts(corpus, test_counts, seed);
}

SplitResult split_by_test_counts(const LabeledCorpus& corpus,
                                 const ClassCounts& test_counts,
                                 std::uint64_t seed) {
  return split_with_counts(corpus, test_counts, seed);
}

void write_split(const SplitResult& split, const std::string& prefix,
                 const DatasetFormat& format, double test_fraction,
                 std::uint64_t seed, const std::string& config_hash) {
  FileProvenance prov{config_hash, seed};
  save_dataset(split.train, prefix + ".train", format, prov);
  save_dataset(split.test, prefix + ".test", format, prov);

  nlohmann::json sidecar;
  sidecar["seed"] = seed;
  sidecar["test_fraction"] = test_fraction;
  sidecar["config_hash"] = config_hash;
  sidecar["train_counts"] = split.train.counts();
  sidecar["test_counts"] = split.test.counts();
  std::ofstream out(prefix + ".split.json", std::ios::binary);
  if (!out) throw DataError("cannot write split sidecar: " + prefix);
  out << sidecar.dump(2) << "\n";
}

}  // namespace codemix

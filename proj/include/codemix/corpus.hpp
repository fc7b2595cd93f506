#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "codemix/errors.hpp"

namespace codemix {

// Class indices are stable: 0 / 1 / 2 in this order.
enum class ClassLabel : int { NonOffensive = 0, Offensive = 1, HateInducing = 2 };

inline constexpr int kNumClasses = 3;

inline int label_index(ClassLabel l) { return static_cast<int>(l); }
ClassLabel label_from_index(int i);

// Configurable label spellings; defaults follow the dataset's annotation
// scheme.
struct LabelNames {
  std::array<std::string, kNumClasses> names{"Non-Offensive", "Offensive",
                                             "Hate-Inducing"};

  const std::string& of(ClassLabel l) const { return names[label_index(l)]; }
  std::optional<ClassLabel> parse(const std::string& s) const;
};

// Provenance of a record: either an original message or an augmented copy
// pointing back at the original it was derived from.
struct Origin {
  bool augmented = false;
  std::string source_id;  // set iff augmented

  bool operator==(const Origin&) const = default;
};

struct MessageRecord {
  std::string id;
  std::string text;
  ClassLabel label = ClassLabel::NonOffensive;
  Origin origin;

  bool operator==(const MessageRecord&) const = default;
};

using ClassCounts = std::array<std::size_t, kNumClasses>;

// Ordered collection of labeled messages with a maintained per-class tally.
// Append-only; ids are unique, texts non-empty after trimming, and augmented
// records must reference an already present original.
class LabeledCorpus {
 public:
  void append(MessageRecord record);

  const std::vector<MessageRecord>& records() const { return records_; }
  const MessageRecord& at(std::size_t i) const { return records_[i]; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const ClassCounts& counts() const { return counts_; }
  bool contains_id(const std::string& id) const {
    return ids_.count(id) != 0;
  }

 private:
  std::vector<MessageRecord> records_;
  ClassCounts counts_{};
  std::unordered_map<std::string, std::size_t> ids_;
};

ClassCounts class_distribution(const LabeledCorpus& corpus);

// Dataset file format: UTF-8, one record per line, columns
// label <delim> text [<delim> id [<delim> origin]]. Lines starting with '#'
// are comments. A comma delimiter switches field parsing to standard CSV
// quoting rules.
struct DatasetFormat {
  char delimiter = '\t';
  LabelNames labels;
  bool has_header = false;
};

// Optional provenance header written as a '#' comment line.
struct FileProvenance {
  std::string config_hash;
  std::uint64_t seed = 0;
};

LabeledCorpus load_dataset(const std::string& path,
                           const DatasetFormat& format = {});
void save_dataset(const LabeledCorpus& corpus, const std::string& path,
                  const DatasetFormat& format = {},
                  const std::optional<FileProvenance>& provenance = {});

struct SplitResult {
  LabeledCorpus train;
  LabeledCorpus test;
};

// Seeded stratified split. Per class, the test size is round-half-up of
// test_fraction times the class count; record order within each side follows
// the input corpus.
SplitResult stratified_split(const LabeledCorpus& corpus, double test_fraction,
                             std::uint64_t seed);

// Same sampling scheme with explicit per-class test counts.
SplitResult split_by_test_counts(const LabeledCorpus& corpus,
                                 const ClassCounts& test_counts,
                                 std::uint64_t seed);

// Writes <prefix>.train, <prefix>.test and a <prefix>.split.json sidecar
// recording seed and fraction.
void write_split(const SplitResult& split, const std::string& prefix,
                 const DatasetFormat& format, double test_fraction,
                 std::uint64_t seed, const std::string& config_hash);

}  // namespace codemix

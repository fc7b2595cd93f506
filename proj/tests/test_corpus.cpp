#include "codemix/corpus.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "doctest.h"
#include "test_util.hpp"

#include "codemix/rng.hpp"

using namespace codemix;

namespace {

// Builds a corpus with the given per-class counts; texts are distinct.
LabeledCorpus make_corpus(const ClassCounts& counts) {
  LabeledCorpus corpus;
  std::size_t ordinal = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    for (std::size_t i = 0; i < counts[c]; ++i) {
      MessageRecord rec;
      rec.id = "m" + std::to_string(++ordinal);
      rec.text = "text number " + std::to_string(ordinal);
      rec.label = label_from_index(c);
      corpus.append(std::move(rec));
    }
  }
  return corpus;
}

std::string dataset_lines(const ClassCounts& counts) {
  LabelNames names;
  std::ostringstream out;
  std::size_t ordinal = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    for (std::size_t i = 0; i < counts[c]; ++i) {
      out << names.names[c] << '\t' << "message " << ++ordinal << '\n';
    }
  }
  return out.str();
}

}  // namespace

TEST_CASE("load_dataset reproduces the annotated corpus counts") {
  testutil::TempDir dir;
  const auto path = dir.file("heot.tsv");
  testutil::write_file(path, dataset_lines({1121, 303, 1765}));
  LabeledCorpus corpus = load_dataset(path);
  CHECK(corpus.counts() == ClassCounts{1121, 303, 1765});
  CHECK(corpus.size() == 3189);
  // Row order preserved.
  CHECK(corpus.at(0).label == ClassLabel::NonOffensive);
  CHECK(corpus.at(3188).label == ClassLabel::HateInducing);
}

TEST_CASE("load_dataset rejects degenerate input") {
  testutil::TempDir dir;

  SUBCASE("header-only file") {
    const auto path = dir.file("empty.tsv");
    testutil::write_file(path, "label\ttext\n");
    DatasetFormat fmt;
    fmt.has_header = true;
    CHECK_THROWS_WITH_AS(load_dataset(path, fmt),
                         doctest::Contains("empty dataset"), DataError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_dataset(dir.file("nope.tsv")), DataError);
  }
  SUBCASE("unknown label names the line") {
    const auto path = dir.file("bad.tsv");
    testutil::write_file(path, "Non-Offensive\tok\nWeird\toops\n");
    CHECK_THROWS_WITH_AS(load_dataset(path), doctest::Contains("line 2"),
                         DataError);
  }
  SUBCASE("malformed row names the line") {
    const auto path = dir.file("short.tsv");
    testutil::write_file(path, "Non-Offensive\n");
    CHECK_THROWS_WITH_AS(load_dataset(path), doctest::Contains("line 1"),
                         DataError);
  }
  SUBCASE("empty text") {
    const auto path = dir.file("blank.tsv");
    testutil::write_file(path, "Offensive\t   \n");
    CHECK_THROWS_AS(load_dataset(path), DataError);
  }
}

TEST_CASE("load_dataset minimal three-row file") {
  testutil::TempDir dir;
  const auto path = dir.file("mini.tsv");
  testutil::write_file(
      path, "Non-Offensive\taa\nOffensive\tbb\nHate-Inducing\tcc\n");
  LabeledCorpus corpus = load_dataset(path);
  CHECK(corpus.counts() == ClassCounts{1, 1, 1});
}

TEST_CASE("dataset round-trips through save and load") {
  testutil::TempDir dir;
  LabeledCorpus corpus = make_corpus({5, 3, 4});
  // An augmented record with provenance survives the trip too.
  MessageRecord aug;
  aug.id = "m1-aug1";
  aug.text = "copied text";
  aug.label = ClassLabel::NonOffensive;
  aug.origin = Origin{true, "m1"};
  corpus.append(aug);

  SUBCASE("tab delimiter") {
    const auto path = dir.file("round.tsv");
    save_dataset(corpus, path);
    LabeledCorpus loaded = load_dataset(path);
    CHECK(loaded.records() == corpus.records());
  }
  SUBCASE("comma delimiter quotes csv specials") {
    DatasetFormat fmt;
    fmt.delimiter = ',';
    LabeledCorpus tricky;
    tricky.append({"x1", "hello, \"world\"", ClassLabel::Offensive, {}});
    const auto path = dir.file("round.csv");
    save_dataset(tricky, path, fmt);
    LabeledCorpus loaded = load_dataset(path, fmt);
    CHECK(loaded.records() == tricky.records());
  }
}

TEST_CASE("corpus invariants") {
  LabeledCorpus corpus = make_corpus({2, 1, 1});
  SUBCASE("counts match a recomputed tally") {
    CHECK(class_distribution(corpus) == corpus.counts());
  }
  SUBCASE("duplicate ids rejected") {
    MessageRecord dup{"m1", "again", ClassLabel::Offensive, {}};
    CHECK_THROWS_AS(corpus.append(dup), DataError);
  }
  SUBCASE("augmented origin must reference an original") {
    MessageRecord orphan{"x9", "text", ClassLabel::Offensive,
                         Origin{true, "missing"}};
    CHECK_THROWS_AS(corpus.append(orphan), DataError);
  }
}

TEST_CASE("class_distribution") {
  CHECK(class_distribution(LabeledCorpus{}) == ClassCounts{0, 0, 0});
  CHECK(class_distribution(make_corpus({0, 1, 0})) == ClassCounts{0, 1, 0});
  // Post-augmentation training distribution.
  CHECK(class_distribution(make_corpus({3572, 1638, 2724})) ==
        ClassCounts{3572, 1638, 2724});
  CHECK(make_corpus({3572, 1638, 2724}).size() == 7934);
}

TEST_CASE("stratified_split arithmetic and determinism") {
  SUBCASE("paper-sized corpus at 22%") {
    LabeledCorpus corpus = make_corpus({1121, 303, 1765});
    auto split = stratified_split(corpus, 0.22, 7);
    // Round-half-up per class: 246.62 -> 247, 66.66 -> 67, 388.3 -> 388.
    CHECK(split.test.counts() == ClassCounts{247, 67, 388});
    const std::size_t test_total = split.test.size();
    const std::size_t train_total = split.train.size();
    CHECK(test_total + train_total == corpus.size());
    CHECK(test_total > 650);
    CHECK(test_total < 750);  // near the 700 held out in the source split
    CHECK(train_total > 2439);
    CHECK(train_total < 2539);
  }
  SUBCASE("exact arithmetic: 10 per class at 0.2") {
    LabeledCorpus corpus = make_corpus({10, 10, 10});
    auto split = stratified_split(corpus, 0.2, 3);
    CHECK(split.test.counts() == ClassCounts{2, 2, 2});
  }
  SUBCASE("same seed twice gives identical splits") {
    LabeledCorpus corpus = make_corpus({31, 17, 23});
    auto a = stratified_split(corpus, 0.25, 99);
    auto b = stratified_split(corpus, 0.25, 99);
    CHECK(a.train.records() == b.train.records());
    CHECK(a.test.records() == b.test.records());
  }
  SUBCASE("class below two records is an error") {
    LabeledCorpus corpus = make_corpus({5, 1, 5});
    CHECK_THROWS_AS(stratified_split(corpus, 0.2, 1), DataError);
  }
}

TEST_CASE("stratified_split partitions exactly across fuzzed corpora") {
  SeededRng rng(20240811);
  for (int trial = 0; trial < 25; ++trial) {
    ClassCounts counts{2 + rng.uniform_index(40), 2 + rng.uniform_index(40),
                       2 + rng.uniform_index(40)};
    LabeledCorpus corpus = make_corpus(counts);
    const double fraction = 0.05 + 0.9 * rng.uniform();
    auto split = stratified_split(corpus, fraction, rng.next_u64());

    std::set<std::string> train_ids, test_ids;
    for (const auto& r : split.train.records()) train_ids.insert(r.id);
    for (const auto& r : split.test.records()) test_ids.insert(r.id);
    CHECK(train_ids.size() + test_ids.size() == corpus.size());
    for (const auto& id : test_ids) CHECK(train_ids.count(id) == 0);
    for (const auto& r : corpus.records()) {
      CHECK((train_ids.count(r.id) + test_ids.count(r.id)) == 1);
    }
    // Per-class test size within one record of fraction * class size.
    for (int c = 0; c < kNumClasses; ++c) {
      const double target = fraction * static_cast<double>(counts[c]);
      CHECK(std::abs(static_cast<double>(split.test.counts()[c]) - target) <
            1.0);
    }
  }
}

TEST_CASE("split_by_test_counts reproduces the source test counts") {
  LabeledCorpus corpus = make_corpus({1121, 303, 1765});
  auto split = split_by_test_counts(corpus, {228, 69, 403}, 11);
  CHECK(split.test.counts() == ClassCounts{228, 69, 403});
  CHECK(split.train.counts() == ClassCounts{893, 234, 1362});
}

TEST_CASE("write_split emits both files plus sidecar") {
  testutil::TempDir dir;
  LabeledCorpus corpus = make_corpus({8, 4, 6});
  auto split = stratified_split(corpus, 0.25, 5);
  write_split(split, dir.file("part"), {}, 0.25, 5, "cafebabe");
  LabeledCorpus train = load_dataset(dir.file("part.train"));
  LabeledCorpus test = load_dataset(dir.file("part.test"));
  CHECK(train.size() == split.train.size());
  CHECK(test.size() == split.test.size());
  const std::string sidecar = testutil::read_file(dir.file("part.split.json"));
  CHECK(sidecar.find("\"seed\": 5") != std::string::npos);
  CHECK(sidecar.find("0.25") != std::string::npos);
}

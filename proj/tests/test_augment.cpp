#include "codemix/augment.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "test_util.hpp"

using namespace codemix;

namespace {

StopwordList stoplist(std::initializer_list<std::string> words) {
  StopwordList s;
  s.words = words;
  return s;
}

SynonymLexicon lexicon(
    std::initializer_list<
        std::pair<std::string, std::vector<std::string>>> entries) {
  SynonymLexicon lex;
  for (const auto& [k, v] : entries) lex.entries[k] = v;
  return lex;
}

std::multiset<std::string> multiset_of(const std::vector<std::string>& v) {
  return {v.begin(), v.end()};
}

bool is_subsequence(const std::vector<std::string>& needle,
                    const std::vector<std::string>& haystack) {
  std::size_t i = 0;
  for (const auto& tok : haystack) {
    if (i < needle.size() && tok == needle[i]) ++i;
  }
  return i == needle.size();
}

std::vector<std::string> random_sentence(SeededRng& rng, std::size_t max_len) {
  static const std::vector<std::string> pool = {
      "good", "bad",  "movie", "kill", "love", "we",   "ride",
      "fast", "slow", "happy", "sad",  "big",  "small"};
  std::vector<std::string> s;
  const std::size_t len = rng.uniform_index(max_len + 1);
  for (std::size_t i = 0; i < len; ++i) {
    s.push_back(pool[rng.uniform_index(pool.size())]);
  }
  return s;
}

LabeledCorpus corpus_with(const ClassCounts& counts) {
  LabeledCorpus corpus;
  std::size_t ordinal = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    for (std::size_t i = 0; i < counts[c]; ++i) {
      MessageRecord rec;
      rec.id = "m" + std::to_string(++ordinal);
      rec.text = "alpha beta gamma delta";
      rec.label = label_from_index(c);
      corpus.append(std::move(rec));
    }
  }
  return corpus;
}

}  // namespace

TEST_CASE("synonym replacement") {
  auto lex = lexicon({{"good", {"great"}}});
  StopwordList none;

  SUBCASE("forced single choice") {
    SeededRng rng(1);
    CHECK(synonym_replacement({"good", "movie"}, 1, lex, none, rng) ==
          std::vector<std::string>{"great", "movie"});
  }
  SUBCASE("n = 0 is the identity") {
    SeededRng rng(2);
    CHECK(synonym_replacement({"good", "movie"}, 0, lex, none, rng) ==
          std::vector<std::string>{"good", "movie"});
  }
  SUBCASE("no eligible position leaves input unchanged") {
    SeededRng rng(3);
    CHECK(synonym_replacement({"zzz"}, 2, lex, none, rng) ==
          std::vector<std::string>{"zzz"});
    auto stop = stoplist({"good"});
    CHECK(synonym_replacement({"good"}, 1, lex, stop, rng) ==
          std::vector<std::string>{"good"});
  }
  SUBCASE("position choice is uniform over eligible slots") {
    auto two = lexicon({{"a", {"x"}}, {"b", {"y"}}});
    SeededRng rng(20240800);
    int first = 0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
      auto out = synonym_replacement({"a", "b"}, 1, two, none, rng);
      const bool xa = out == std::vector<std::string>{"x", "b"};
      const bool yb = out == std::vector<std::string>{"a", "y"};
      CHECK((xa || yb));
      if (xa) ++first;
    }
    const double freq = static_cast<double>(first) / trials;
    CHECK(freq > 0.48);
    CHECK(freq < 0.52);
  }
  SUBCASE("length preserved and stopwords untouched over fuzz") {
    auto lex2 = lexicon({{"good", {"great", "fine"}},
                         {"bad", {"awful"}},
                         {"kill", {"slay"}},
                         {"love", {"adore"}}});
    auto stop = stoplist({"we", "good"});
    SeededRng rng(55);
    for (int t = 0; t < 1000; ++t) {
      auto sentence = random_sentence(rng, 12);
      auto out = synonym_replacement(sentence, 2, lex2, stop, rng);
      CHECK(out.size() == sentence.size());
      for (std::size_t i = 0; i < sentence.size(); ++i) {
        if (stop.contains(sentence[i])) CHECK(out[i] == sentence[i]);
      }
    }
  }
}

TEST_CASE("random insertion") {
  auto lex = lexicon({{"good", {"great"}}});
  StopwordList none;

  SUBCASE("single insertion lands in either slot with equal probability") {
    SeededRng rng(99);
    int before = 0, after = 0;
    for (int i = 0; i < 10000; ++i) {
      auto out = random_insertion({"good"}, 1, lex, none, rng);
      REQUIRE(out.size() == 2);
      if (out == std::vector<std::string>{"great", "good"}) {
        ++before;
      } else {
        CHECK(out == std::vector<std::string>{"good", "great"});
        ++after;
      }
    }
    CHECK(before + after == 10000);
    CHECK(std::abs(before - after) < 400);
  }
  SUBCASE("n = 0 identity; empty input stays empty") {
    SeededRng rng(5);
    CHECK(random_insertion({"good"}, 0, lex, none, rng) ==
          std::vector<std::string>{"good"});
    CHECK(random_insertion({}, 3, lex, none, rng).empty());
  }
  SUBCASE("originals form a subsequence; growth bounded by n") {
    auto lex2 = lexicon({{"good", {"great"}}, {"love", {"adore"}}});
    SeededRng rng(42);
    for (int t = 0; t < 1000; ++t) {
      auto sentence = random_sentence(rng, 10);
      auto out = random_insertion(sentence, 3, lex2, stoplist({"we"}), rng);
      CHECK(out.size() <= sentence.size() + 3);
      CHECK(is_subsequence(sentence, out));
    }
  }
}

TEST_CASE("random swap") {
  SUBCASE("short inputs unchanged") {
    SeededRng rng(7);
    CHECK(random_swap({"a"}, 5, rng) == std::vector<std::string>{"a"});
    CHECK(random_swap({}, 5, rng).empty());
  }
  SUBCASE("pair distribution matches two independent uniform draws") {
    // On two tokens, (i, j) hits {(0,0),(0,1),(1,0),(1,1)} uniformly, so
    // the swap shows with probability one half.
    SeededRng rng(123);
    int swapped = 0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
      auto out = random_swap({"a", "b"}, 1, rng);
      if (out == std::vector<std::string>{"b", "a"}) ++swapped;
    }
    const double freq = static_cast<double>(swapped) / trials;
    CHECK(freq > 0.48);
    CHECK(freq < 0.52);
  }
  SUBCASE("multiset preserved over fuzz") {
    SeededRng rng(31337);
    for (int t = 0; t < 1000; ++t) {
      auto sentence = random_sentence(rng, 15);
      auto out =
          random_swap(sentence, static_cast<int>(rng.uniform_index(4)), rng);
      CHECK(multiset_of(out) == multiset_of(sentence));
    }
  }
}

TEST_CASE("random deletion") {
  SUBCASE("p = 0 identity") {
    SeededRng rng(8);
    std::vector<std::string> s = {"a", "b", "c"};
    CHECK(random_deletion(s, 0.0, rng) == s);
  }
  SUBCASE("p = 1 keeps one uniformly chosen original token") {
    SeededRng rng(9);
    std::map<std::string, int> seen;
    for (int i = 0; i < 3000; ++i) {
      auto out = random_deletion({"a", "b", "c"}, 1.0, rng);
      REQUIRE(out.size() == 1);
      seen[out[0]] += 1;
    }
    CHECK(seen.size() == 3);
    for (const auto& [tok, count] : seen) CHECK(count > 800);
  }
  SUBCASE("mean kept length matches the binomial expectation") {
    std::vector<std::string> sentence(100, "tok");
    SeededRng rng(20240811);
    long total = 0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
      total += static_cast<long>(random_deletion(sentence, 0.3, rng).size());
    }
    const double mean = static_cast<double>(total) / trials;
    CHECK(mean > 70.0 - 1.5);
    CHECK(mean < 70.0 + 1.5);
  }
  SUBCASE("order preserved") {
    SeededRng rng(10);
    for (int t = 0; t < 500; ++t) {
      std::vector<std::string> sentence;
      for (int i = 0; i < 12; ++i) sentence.push_back("w" + std::to_string(i));
      auto out = random_deletion(sentence, 0.4, rng);
      CHECK(is_subsequence(out, sentence));
    }
  }
}

TEST_CASE("augment_corpus expands to the published training counts") {
  // Train counts derive from the corpus table minus the held-out test
  // counts; multipliers (4, 7, 2) are the exact integer ratios.
  LabeledCorpus train = corpus_with({893, 234, 1362});
  AugmentConfig config;
  config.seed = 17;
  auto lex = lexicon({{"alpha", {"alef"}}, {"beta", {"bet"}}});
  auto out = augment_corpus(train, config, lex, StopwordList{});
  CHECK(out.counts() == ClassCounts{3572, 1638, 2724});
  CHECK(out.size() == 7934);
}

TEST_CASE("augment_corpus behavior") {
  auto lex = lexicon({{"alpha", {"alef"}}, {"gamma", {"gimel"}}});
  StopwordList none;

  SUBCASE("multipliers of one reproduce the input") {
    LabeledCorpus train = corpus_with({3, 2, 2});
    AugmentConfig config;
    config.per_class_multipliers = {{ClassLabel::NonOffensive, 1},
                                    {ClassLabel::Offensive, 1},
                                    {ClassLabel::HateInducing, 1}};
    auto out = augment_corpus(train, config, lex, none);
    CHECK(out.records() == train.records());
  }
  SUBCASE("same seed twice is identical") {
    LabeledCorpus train = corpus_with({4, 3, 2});
    AugmentConfig config;
    config.seed = 5;
    auto a = augment_corpus(train, config, lex, none);
    auto b = augment_corpus(train, config, lex, none);
    CHECK(a.records() == b.records());
  }
  SUBCASE("augmented records carry valid provenance") {
    LabeledCorpus train = corpus_with({2, 2, 2});
    AugmentConfig config;
    config.seed = 3;
    auto out = augment_corpus(train, config, lex, none);
    for (const auto& r : out.records()) {
      if (r.origin.augmented) {
        CHECK(out.contains_id(r.origin.source_id));
        CHECK(r.id.find(r.origin.source_id + "-aug") == 0);
      }
    }
  }
  SUBCASE("augmented input is rejected") {
    LabeledCorpus train = corpus_with({2, 2, 2});
    AugmentConfig config;
    auto once = augment_corpus(train, config, lex, none);
    CHECK_THROWS_AS(augment_corpus(once, config, lex, none), DataError);
  }
  SUBCASE("missing class multiplier is an error") {
    LabeledCorpus train = corpus_with({2, 2, 2});
    AugmentConfig config;
    config.per_class_multipliers.erase(ClassLabel::Offensive);
    CHECK_THROWS_AS(augment_corpus(train, config, lex, none), DataError);
  }
  SUBCASE("per-record seeding is order independent") {
    LabeledCorpus train = corpus_with({3, 2, 2});
    AugmentConfig config;
    config.seed = 11;
    auto full = augment_corpus(train, config, lex, none);

    LabeledCorpus reversed;
    for (auto it = train.records().rbegin(); it != train.records().rend();
         ++it) {
      reversed.append(*it);
    }
    auto from_reversed = augment_corpus(reversed, config, lex, none);

    std::map<std::string, std::string> texts_full, texts_rev;
    for (const auto& r : full.records()) texts_full[r.id] = r.text;
    for (const auto& r : from_reversed.records()) texts_rev[r.id] = r.text;
    CHECK(texts_full == texts_rev);
  }
}

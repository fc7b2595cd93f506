#include "codemix/preprocess.hpp"

#include <algorithm>

#include "doctest.h"
#include "test_util.hpp"

#include "codemix/rng.hpp"

using namespace codemix;

namespace {

const PreprocessResources& shipped_resources() {
  static PreprocessResources res{
      StopwordList::load(testutil::data_file("stopwords.txt")),
      TransliterationDictionary::load(
          testutil::data_file("hinglish_dict.tsv"))};
  return res;
}

std::string random_noise_string(SeededRng& rng) {
  static const std::string pool =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
      "0123456789 @#:;()/\\.!?'\"-_<>[]{}*&%$^~`|+=\t";
  static const std::vector<std::string> multibyte = {
      "\xc3\xa9", "\xe0\xa4\xb9", "\xf0\x9f\x98\x80", "\xe2\x9d\xa4"};
  std::string s;
  const std::size_t len = rng.uniform_index(60);
  for (std::size_t i = 0; i < len; ++i) {
    if (rng.uniform() < 0.1) {
      s += multibyte[rng.uniform_index(multibyte.size())];
    } else {
      s.push_back(pool[rng.uniform_index(pool.size())]);
    }
  }
  return s;
}

}  // namespace

TEST_CASE("clean_text strips message noise") {
  CHECK(clean_text("Hum sab ghumne jaa rahe hain? http://t.") ==
        "hum sab ghumne jaa rahe hain");
  CHECK(clean_text("@username1 Mujhe mat sikha:/") == "mujhe mat sikha");
  CHECK(clean_text("") == "");
  SUBCASE("hashtag body retained, marker dropped") {
    CHECK(clean_text("terrorist Akbaar kill #SaveWorld") ==
          "terrorist akbaar kill saveworld");
  }
  SUBCASE("digits and punctuation vanish") {
    CHECK(clean_text("call 911 now!!!") == "call now");
    CHECK(clean_text("don't stop") == "dont stop");
  }
  SUBCASE("emoticons with letter mouths vanish") {
    CHECK(clean_text("great :D movie ;-) yes <3") == "great movie yes");
    CHECK(clean_text("so sad :( right (-:") == "so sad right");
  }
  SUBCASE("urls in any position") {
    CHECK(clean_text("see www.example.com okay") == "see okay");
    CHECK(clean_text("HTTPS://X.Y/z?a=1 tail") == "tail");
  }
  SUBCASE("non-ascii codepoints are dropped") {
    CHECK(clean_text("caf\xc3\xa9 \xf0\x9f\x98\x80 ok") == "caf ok");
  }
}

TEST_CASE("clean_text is idempotent on fuzzed input") {
  SeededRng rng(0xc1ea);
  for (int i = 0; i < 500; ++i) {
    const std::string raw = random_noise_string(rng);
    const std::string once = clean_text(raw);
    CHECK(clean_text(once) == once);
    // Closure: lowercase letters and single spaces only.
    for (char c : once) {
      const bool ok = (c >= 'a' && c <= 'z') || c == ' ';
      CHECK(ok);
    }
    CHECK(once.find("  ") == std::string::npos);
  }
}

TEST_CASE("tokenize") {
  CHECK(tokenize("hum sab") == std::vector<std::string>{"hum", "sab"});
  CHECK(tokenize("") == std::vector<std::string>{});
  CHECK(tokenize("a b  c") == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("remove_stopwords") {
  StopwordList list;
  list.words = {"we", "all", "are"};
  CHECK(remove_stopwords({"we", "all", "are", "going", "outside"}, list) ==
        std::vector<std::string>{"going", "outside"});
  CHECK(remove_stopwords({}, list) == std::vector<std::string>{});

  SUBCASE("content words are not in the shipped stoplist") {
    const auto& res = shipped_resources();
    CHECK(remove_stopwords({"kill", "terrorist"}, res.stopwords) ==
          std::vector<std::string>{"kill", "terrorist"});
    CHECK_FALSE(res.stopwords.contains("kill"));
    CHECK_FALSE(res.stopwords.contains("terrorist"));
  }
  SUBCASE("concatenation homomorphism") {
    SeededRng rng(77);
    const std::vector<std::string> pool = {"we",  "all",  "kill", "are",
                                           "big", "going", "sab"};
    StopwordList stop;
    stop.words = {"we", "all", "are", "sab"};
    for (int t = 0; t < 100; ++t) {
      std::vector<std::string> a, b;
      for (std::size_t i = rng.uniform_index(6); i-- > 0;) {
        a.push_back(pool[rng.uniform_index(pool.size())]);
      }
      for (std::size_t i = rng.uniform_index(6); i-- > 0;) {
        b.push_back(pool[rng.uniform_index(pool.size())]);
      }
      std::vector<std::string> ab = a;
      ab.insert(ab.end(), b.begin(), b.end());
      auto fa = remove_stopwords(a, stop);
      auto fb = remove_stopwords(b, stop);
      fa.insert(fa.end(), fb.begin(), fb.end());
      CHECK(remove_stopwords(ab, stop) == fa);
    }
  }
}

TEST_CASE("transliterate") {
  TransliterationDictionary dict;
  dict.entries = {{"mujhe", {"me"}}, {"mat", {"not"}}, {"sikha", {"teach"}}};
  CHECK(transliterate({"mujhe", "mat", "sikha"}, dict) ==
        std::vector<std::string>{"me", "not", "teach"});

  CHECK(transliterate({"hello"}, TransliterationDictionary{}) ==
        std::vector<std::string>{"hello"});

  SUBCASE("spelling variants collapse to one gloss") {
    TransliterationDictionary variants;
    variants.entries = {{"pyaar", {"love"}}, {"pyar", {"love"}},
                        {"pyr", {"love"}}};
    CHECK(transliterate({"pyaar"}, variants) ==
          std::vector<std::string>{"love"});
    CHECK(transliterate({"pyar"}, variants) ==
          std::vector<std::string>{"love"});
    CHECK(transliterate({"pyr"}, variants) ==
          std::vector<std::string>{"love"});
  }
  SUBCASE("multi-token gloss expands in place") {
    TransliterationDictionary multi;
    multi.entries = {{"bakwas", {"utter", "nonsense"}}};
    CHECK(transliterate({"pure", "bakwas", "talk"}, multi) ==
          std::vector<std::string>{"pure", "utter", "nonsense", "talk"});
  }
  SUBCASE("concatenation homomorphism") {
    auto f = [&](std::vector<std::string> v) {
      return transliterate(v, dict);
    };
    std::vector<std::string> a = {"mujhe", "zzz"};
    std::vector<std::string> b = {"mat", "sikha", "qqq"};
    std::vector<std::string> ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    auto expect = f(a);
    auto fb = f(b);
    expect.insert(expect.end(), fb.begin(), fb.end());
    CHECK(f(ab) == expect);
  }
}

TEST_CASE("pipeline golden outputs with shipped resources") {
  const auto& res = shipped_resources();
  SUBCASE("non-offensive sample") {
    auto msg =
        preprocess_pipeline("Hum sab ghumne jaa rahe hain? http://t.", res);
    CHECK(msg.tokens ==
          std::vector<std::string>{"roam", "go", "remain", "exist"});
  }
  SUBCASE("offensive sample") {
    auto msg = preprocess_pipeline("@username1 Mujhe mat sikha:/", res);
    CHECK(msg.tokens == std::vector<std::string>{"never", "teach"});
  }
  SUBCASE("hate sample") {
    auto msg = preprocess_pipeline("terrorist Akbaar kill #SaveWorld", res);
    CHECK(msg.tokens == std::vector<std::string>{"terrorist", "akbaar",
                                                 "kill", "saveworld"});
  }
  SUBCASE("empty input") {
    auto msg = preprocess_pipeline("", res);
    CHECK(msg.tokens.empty());
  }
  SUBCASE("stage trace populated when auditing") {
    auto msg = preprocess_pipeline("Hum sab ghumne jaa rahe hain?", res, true);
    REQUIRE(msg.stage_trace.has_value());
    CHECK(msg.stage_trace->tokens_cleaned == 6);
    CHECK(msg.stage_trace->tokens_after_stopwords == 4);
    CHECK(msg.stage_trace->tokens_after_transliteration == 4);
  }
}

TEST_CASE("pipeline output is closed under reapplication") {
  const auto& res = shipped_resources();
  SeededRng rng(4242);
  std::vector<std::string> samples = {
      "Hum sab ghumne jaa rahe hain? http://t.",
      "@username1 Mujhe mat sikha:/",
      "yeh duniya bahut paagal hai :D #truth",
      "tum log bakwas karo mat,宇宙 123",
  };
  for (int i = 0; i < 200; ++i) samples.push_back(random_noise_string(rng));

  for (const auto& raw : samples) {
    auto once = preprocess_pipeline(raw, res);
    for (const auto& tok : once.tokens) {
      CHECK_FALSE(res.stopwords.contains(tok));
      CHECK(res.dictionary.find(tok) == nullptr);
      for (char c : tok) CHECK((c >= 'a' && c <= 'z'));
    }
    auto twice = preprocess_pipeline(join_tokens(once.tokens), res);
    CHECK(twice.tokens == once.tokens);
  }
}

TEST_CASE("resource file loading") {
  testutil::TempDir dir;
  SUBCASE("stopword entries must not contain whitespace") {
    const auto path = dir.file("stop.txt");
    testutil::write_file(path, "ok\nbad entry\n");
    CHECK_THROWS_AS(StopwordList::load(path), DataError);
  }
  SUBCASE("stopwords lowercased on load, comments skipped") {
    const auto path = dir.file("stop.txt");
    testutil::write_file(path, "# comment\nThe\n\nAND\n");
    auto list = StopwordList::load(path);
    CHECK(list.contains("the"));
    CHECK(list.contains("and"));
    CHECK(list.words.size() == 2);
  }
  SUBCASE("dictionary wants tab-separated lines") {
    const auto path = dir.file("dict.tsv");
    testutil::write_file(path, "word no tab\n");
    CHECK_THROWS_AS(TransliterationDictionary::load(path), DataError);
  }
  SUBCASE("dictionary multi-token values and comments") {
    const auto path = dir.file("dict.tsv");
    testutil::write_file(path, "# note\nBAKWAS\tUtter Nonsense\n");
    auto dict = TransliterationDictionary::load(path);
    REQUIRE(dict.find("bakwas") != nullptr);
    CHECK(*dict.find("bakwas") ==
          std::vector<std::string>{"utter", "nonsense"});
  }
}

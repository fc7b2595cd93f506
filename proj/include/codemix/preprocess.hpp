#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "codemix/errors.hpp"

namespace codemix {

// Lowercase tokens to drop before transliteration. File format: one token
// per line, '#' comments allowed, UTF-8.
struct StopwordList {
  std::unordered_set<std::string> words;

  bool contains(const std::string& token) const {
    return words.count(token) != 0;
  }
  static StopwordList load(const std::string& path);
};

// Offline word-level Hinglish-to-English dictionary. File format per line:
// source<TAB>target tokens ('#' comments allowed). Values may span several
// tokens.
struct TransliterationDictionary {
  std::unordered_map<std::string, std::vector<std::string>> entries;

  const std::vector<std::string>* find(const std::string& token) const {
    auto it = entries.find(token);
    return it == entries.end() ? nullptr : &it->second;
  }
  static TransliterationDictionary load(const std::string& path);
};

// Strips message noise and normalizes to lowercase ASCII letters separated
// by single spaces. Removes, in order: URLs, @-mentions, ASCII emoticons,
// then every character that is not an ASCII letter (apostrophes are deleted
// in place, everything else becomes a space, which also drops digits,
// punctuation, '#' markers and non-ASCII codepoints). Idempotent.
std::string clean_text(std::string_view raw);

// Whitespace split of already cleaned text.
std::vector<std::string> tokenize(std::string_view cleaned);

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const StopwordList& stopwords);

// Replaces every token with a dictionary entry by its (possibly multi-token)
// gloss; unknown tokens pass through.
std::vector<std::string> transliterate(const std::vector<std::string>& tokens,
                                       const TransliterationDictionary& dict);

struct StageTrace {
  std::size_t tokens_cleaned = 0;
  std::size_t tokens_after_stopwords = 0;
  std::size_t tokens_after_transliteration = 0;
};

struct ProcessedMessage {
  std::vector<std::string> tokens;
  std::optional<StageTrace> stage_trace;
};

struct PreprocessResources {
  StopwordList stopwords;
  TransliterationDictionary dictionary;
};

// transliterate . remove_stopwords . tokenize . clean_text
ProcessedMessage preprocess_pipeline(std::string_view raw,
                                     const PreprocessResources& resources,
                                     bool audit = false);

std::string join_tokens(const std::vector<std::string>& tokens);

}  // namespace codemix

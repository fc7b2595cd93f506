#include "codemix/preprocess.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>

namespace codemix {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower_ascii(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

bool has_inner_space(const std::string& s) {
  return s.find_first_of(" \t") != std::string::npos;
}

// Noise patterns. The emoticon class covers the common ASCII forms that
// contain letters and so would survive the punctuation sweep: an eye
// character [:;=8], an optional nose [-o^'*], and one or more mouth
// characters, plus the mirrored form and the heart "<3". Emoticons made of
// punctuation only (e.g. ":/") are caught here too and by the sweep.
const std::regex& url_re() {
  static const std::regex re(R"((https?://\S*|www\.\S*))", std::regex::icase);
  return re;
}
const std::regex& mention_re() {
  static const std::regex re(R"(@\w+)");
  return re;
}
const std::regex& emoticon_re() {
  static const std::regex re(
      R"(([:;=8][-o^'*]?[)(\[\]{}dDpPsSoO/\\|@3*]+)|([)(\[\]{}/\\|@3]+[-o^'*]?[:;=8])|(<3))");
  return re;
}

}  // namespace

StopwordList StopwordList::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stopword file: " + path);
  StopwordList list;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string word = trim(line);
    if (word.empty() || word[0] == '#') continue;
    if (has_inner_space(word)) {
      throw DataError("stopword file line " + std::to_string(line_no) +
                      ": entry contains whitespace");
    }
    list.words.insert(lower_ascii(std::move(word)));
  }
  return list;
}

TransliterationDictionary TransliterationDictionary::load(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dictionary file: " + path);
  TransliterationDictionary dict;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError("dictionary line " + std::to_string(line_no) +
                      ": expected source<TAB>target");
    }
    std::string source = lower_ascii(trim(line.substr(0, tab)));
    std::istringstream targets(lower_ascii(line.substr(tab + 1)));
    std::vector<std::string> value;
    std::string tok;
    while (targets >> tok) value.push_back(tok);
    if (source.empty() || value.empty()) {
      throw DataError("dictionary line " + std::to_string(line_no) +
                      ": empty source or target");
    }
    dict.entries[source] = std::move(value);
  }
  return dict;
}

std::string clean_text(std::string_view raw) {
  std::string s(raw);
  s = std::regex_replace(s, url_re(), " ");
  s = std::regex_replace(s, mention_re(), " ");
  s = std::regex_replace(s, emoticon_re(), " ");
  s = lower_ascii(std::move(s));

  std::string swept;
  swept.reserve(s.size());
  for (char c : s) {
    if (c >= 'a' && c <= 'z') {
      swept.push_back(c);
    } else if (c == '\'') {
      // apostrophes vanish so contractions stay one token
    } else {
      swept.push_back(' ');
    }
  }

  std::string out;
  out.reserve(swept.size());
  for (char c : swept) {
    if (c == ' ') {
      if (!out.empty() && out.back() != ' ') out.push_back(' ');
    } else {
      out.push_back(c);
    }
  }
  if (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::vector<std::string> tokenize(std::string_view cleaned) {
  std::vector<std::string> tokens;
  std::istringstream in{std::string(cleaned)};
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const StopwordList& stopwords) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!stopwords.contains(t)) out.push_back(t);
  }
  return out;
}

std::vector<std::string> transliterate(const std::vector<std::string>& tokens,
                                       const TransliterationDictionary& dict) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (const auto* gloss = dict.find(t)) {
      out.insert(out.end(), gloss->begin(), gloss->end());
    } else {
      out.push_back(t);
    }
  }
  return out;
}

ProcessedMessage preprocess_pipeline(std::string_view raw,
                                     const PreprocessResources& resources,
                                     bool audit) {
  ProcessedMessage msg;
  auto tokens = tokenize(clean_text(raw));
  StageTrace trace;
  trace.tokens_cleaned = tokens.size();
  tokens = remove_stopwords(tokens, resources.stopwords);
  trace.tokens_after_stopwords = tokens.size();
  tokens = transliterate(tokens, resources.dictionary);
  trace.tokens_after_transliteration = tokens.size();
  msg.tokens = std::move(tokens);
  if (audit) msg.stage_trace = trace;
  return msg;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

}  // namespace codemix

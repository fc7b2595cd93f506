#include "codemix/augment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

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

std::vector<std::size_t> eligible_positions(
    const std::vector<std::string>& tokens, const SynonymLexicon& lex,
    const StopwordList& stopwords) {
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!stopwords.contains(tokens[i]) && lex.find(tokens[i])) {
      eligible.push_back(i);
    }
  }
  return eligible;
}

}  // namespace

SynonymLexicon SynonymLexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open synonym lexicon: " + path);
  SynonymLexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError("lexicon line " + std::to_string(line_no) +
                      ": expected token<TAB>syn1,syn2,...");
    }
    std::string token = lower_ascii(trim(line.substr(0, tab)));
    std::vector<std::string> syns;
    std::string rest = line.substr(tab + 1);
    std::size_t start = 0;
    while (start <= rest.size()) {
      auto comma = rest.find(',', start);
      std::string syn = trim(rest.substr(
          start, comma == std::string::npos ? std::string::npos
                                            : comma - start));
      if (!syn.empty()) syns.push_back(lower_ascii(std::move(syn)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (token.empty() || syns.empty()) {
      throw DataError("lexicon line " + std::to_string(line_no) +
                      ": empty token or synonym list");
    }
    if (syns.size() == 1 && syns[0] == token) {
      throw DataError("lexicon line " + std::to_string(line_no) + ": '" +
                      token + "' is its own sole synonym");
    }
    lex.entries[token] = std::move(syns);
  }
  return lex;
}

void AugmentConfig::validate() const {
  if (deletion_probability < 0.0 || deletion_probability > 1.0) {
    throw ConfigError("augment.deletion_probability must be in [0, 1]");
  }
  if (alpha < 0.0) throw ConfigError("augment.alpha must be >= 0");
  if (n_override && *n_override < 0) {
    throw ConfigError("augment.n_override must be >= 0");
  }
  for (const auto& [label, m] : per_class_multipliers) {
    if (m < 1) throw ConfigError("augment multiplier must be >= 1");
  }
}

std::vector<std::string> synonym_replacement(std::vector<std::string> tokens,
                                             int n, const SynonymLexicon& lex,
                                             const StopwordList& stopwords,
                                             SeededRng& rng) {
  if (n <= 0) return tokens;
  auto eligible = eligible_positions(tokens, lex, stopwords);
  if (eligible.empty()) return tokens;
  rng.shuffle(eligible);
  std::size_t k = std::min<std::size_t>(n, eligible.size());
  std::vector<std::size_t> chosen(eligible.begin(), eligible.begin() + k);
  std::sort(chosen.begin(), chosen.end());
  for (std::size_t pos : chosen) {
    const auto& syns = *lex.find(tokens[pos]);
    tokens[pos] = syns[rng.uniform_index(syns.size())];
  }
  return tokens;
}

std::vector<std::string> random_insertion(std::vector<std::string> tokens,
                                          int n, const SynonymLexicon& lex,
                                          const StopwordList& stopwords,
                                          SeededRng& rng) {
  for (int step = 0; step < n; ++step) {
    auto eligible = eligible_positions(tokens, lex, stopwords);
    if (eligible.empty()) continue;
    const auto& word = tokens[eligible[rng.uniform_index(eligible.size())]];
    const auto& syns = *lex.find(word);
    const std::string& synonym = syns[rng.uniform_index(syns.size())];
    std::size_t slot = rng.uniform_index(tokens.size() + 1);
    tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(slot), synonym);
  }
  return tokens;
}

std::vector<std::string> random_swap(std::vector<std::string> tokens, int n,
                                     SeededRng& rng) {
  if (tokens.size() < 2) return tokens;
  for (int step = 0; step < n; ++step) {
    std::size_t i = rng.uniform_index(tokens.size());
    std::size_t j = rng.uniform_index(tokens.size());
    std::swap(tokens[i], tokens[j]);
  }
  return tokens;
}

std::vector<std::string> random_deletion(std::vector<std::string> tokens,
                                         double p, SeededRng& rng) {
  if (tokens.empty()) return tokens;
  std::vector<std::string> kept;
  kept.reserve(tokens.size());
  for (auto& t : tokens) {
    if (rng.uniform() >= p) kept.push_back(std::move(t));
  }
  if (kept.empty()) {
    // tokens were all moved-from only when kept; on the all-deleted path
    // every element was left in place, so indexing the original is safe
    return {tokens[rng.uniform_index(tokens.size())]};
  }
  return kept;
}

LabeledCorpus augment_corpus(const LabeledCorpus& train,
                             const AugmentConfig& config,
                             const SynonymLexicon& lexicon,
                             const StopwordList& stopwords) {
  config.validate();
  LabeledCorpus out;
  for (const auto& record : train.records()) {
    if (record.origin.augmented) {
      throw DataError("augment input must contain only original records; '" +
                      record.id + "' is augmented");
    }
    auto mult = config.per_class_multipliers.find(record.label);
    if (mult == config.per_class_multipliers.end()) {
      throw DataError("no multiplier configured for class index " +
                      std::to_string(label_index(record.label)));
    }
    out.append(record);
    std::vector<std::string> tokens = tokenize(record.text);
    for (int replica = 1; replica < mult->second; ++replica) {
      SeededRng rng(derive_seed(config.seed, record.id,
                                static_cast<std::uint64_t>(replica)));
      int n = config.n_override.value_or(std::max<int>(
          1, static_cast<int>(std::llround(
                 config.alpha * static_cast<double>(tokens.size())))));
      std::vector<std::string> edited;
      switch (rng.uniform_index(4)) {
        case 0:
          edited = synonym_replacement(tokens, n, lexicon, stopwords, rng);
          break;
        case 1:
          edited = random_insertion(tokens, n, lexicon, stopwords, rng);
          break;
        case 2:
          edited = random_swap(tokens, n, rng);
          break;
        default:
          edited = random_deletion(tokens, config.deletion_probability, rng);
          break;
      }
      MessageRecord copy;
      copy.id = record.id + "-aug" + std::to_string(replica);
      copy.text = join_tokens(edited);
      copy.label = record.label;
      copy.origin = Origin{true, record.id};
      out.append(std::move(copy));
    }
  }
  return out;
}

}  // namespace codemix

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "codemix/corpus.hpp"
#include "codemix/preprocess.hpp"
#include "codemix/rng.hpp"

namespace codemix {

// Token -> synonyms map used by synonym replacement and random insertion.
// File format per line: token<TAB>syn1,syn2,... ('#' comments allowed). A
// token must not be its own sole synonym.
struct SynonymLexicon {
  std::unordered_map<std::string, std::vector<std::string>> entries;

  const std::vector<std::string>* find(const std::string& token) const {
    auto it = entries.find(token);
    return it == entries.end() ? nullptr : &it->second;
  }
  static SynonymLexicon load(const std::string& path);
};

struct AugmentConfig {
  // Edits per operation: n = max(1, round(alpha * sentence length)), unless
  // n_override is set.
  double alpha = 0.1;
  std::optional<int> n_override;
  double deletion_probability = 0.1;
  std::map<ClassLabel, int> per_class_multipliers = {
      {ClassLabel::NonOffensive, 4},
      {ClassLabel::Offensive, 7},
      {ClassLabel::HateInducing, 2}};
  std::uint64_t seed = 0;

  void validate() const;
};

// The four EDA edits. Eligible positions for SR/RI are non-stopword tokens
// with a lexicon entry. Swap draws two independent uniform positions (which
// may coincide). Deletion keeps each token with probability 1 - p and falls
// back to a single uniformly chosen original token when everything was
// dropped.
std::vector<std::string> synonym_replacement(std::vector<std::string> tokens,
                                             int n, const SynonymLexicon& lex,
                                             const StopwordList& stopwords,
                                             SeededRng& rng);
std::vector<std::string> random_insertion(std::vector<std::string> tokens,
                                          int n, const SynonymLexicon& lex,
                                          const StopwordList& stopwords,
                                          SeededRng& rng);
std::vector<std::string> random_swap(std::vector<std::string> tokens, int n,
                                     SeededRng& rng);
std::vector<std::string> random_deletion(std::vector<std::string> tokens,
                                         double p, SeededRng& rng);

// Expands a training corpus of original records: each record of class c
// yields multiplier(c) - 1 augmented copies, each produced by one EDA
// operation chosen uniformly at random. Record texts are treated as
// whitespace-joined token sequences. Per-record RNG streams are derived from
// (seed, record id, replica), so the result is independent of processing
// order.
LabeledCorpus augment_corpus(const LabeledCorpus& train,
                             const AugmentConfig& config,
                             const SynonymLexicon& lexicon,
                             const StopwordList& stopwords);

}  // namespace codemix

#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "codemix/augment.hpp"
#include "codemix/corpus.hpp"

namespace codemix {

// Three-class corpus generator for desk-scale runs. Each class owns a pool
// of indicative tokens; a shared pool supplies noise. Every token of a
// message is drawn from the shared pool with probability `overlap`,
// otherwise from the class pool. overlap 0 gives fully separable classes;
// overlap 1 removes the signal entirely, pinning any classifier near chance.
// All tokens are lowercase letters so they survive the cleaning stage.
struct SyntheticSpec {
  std::array<int, kNumClasses> per_class{10, 10, 10};
  int class_pool_size = 24;
  int shared_pool_size = 48;
  double overlap = 0.0;
  int min_length = 4;
  int max_length = 12;
  std::uint64_t seed = 0;

  void validate() const;
};

LabeledCorpus gen_synthetic(const SyntheticSpec& spec);

// Synonym lexicon over the generator's token space: each pool token maps to
// its two pool neighbours, keeping class-indicative tokens class-consistent.
SynonymLexicon gen_synthetic_lexicon(const SyntheticSpec& spec);

// Pool token spelling, exposed for tests: class pools use prefixes
// ka/kb/kc, the shared pool sh, followed by a two-letter base-26 index.
std::string synthetic_token(int pool, int index);

}  // namespace codemix

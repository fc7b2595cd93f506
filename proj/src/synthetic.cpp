#include "codemix/synthetic.hpp"

#include "codemix/preprocess.hpp"
#include "codemix/rng.hpp"

namespace codemix {

void SyntheticSpec::validate() const {
  for (int n : per_class) {
    if (n < 1) throw ConfigError("synthetic.per_class entries must be >= 1");
  }
  if (class_pool_size < 2 || class_pool_size > 676) {
    throw ConfigError("synthetic.class_pool_size must be in [2, 676]");
  }
  if (shared_pool_size < 2 || shared_pool_size > 676) {
    throw ConfigError("synthetic.shared_pool_size must be in [2, 676]");
  }
  if (overlap < 0.0 || overlap > 1.0) {
    throw ConfigError("synthetic.overlap must be in [0, 1]");
  }
  if (min_length < 1 || max_length < min_length) {
    throw ConfigError("synthetic lengths must satisfy 1 <= min <= max");
  }
}

std::string synthetic_token(int pool, int index) {
  static const char* prefixes[] = {"ka", "kb", "kc", "sh"};
  std::string token = prefixes[pool];
  token.push_back(static_cast<char>('a' + index / 26));
  token.push_back(static_cast<char>('a' + index % 26));
  return token;
}

LabeledCorpus gen_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  LabeledCorpus corpus;
  std::size_t ordinal = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    for (int i = 0; i < spec.per_class[c]; ++i) {
      SeededRng rng(derive_seed(spec.seed, "synthetic", ordinal));
      const int length =
          spec.min_length +
          static_cast<int>(rng.uniform_index(
              static_cast<std::size_t>(spec.max_length - spec.min_length + 1)));
      std::vector<std::string> tokens;
      tokens.reserve(length);
      for (int t = 0; t < length; ++t) {
        if (rng.uniform() < spec.overlap) {
          tokens.push_back(synthetic_token(
              kNumClasses, static_cast<int>(rng.uniform_index(
                               static_cast<std::size_t>(spec.shared_pool_size)))));
        } else {
          tokens.push_back(synthetic_token(
              c, static_cast<int>(rng.uniform_index(
                     static_cast<std::size_t>(spec.class_pool_size)))));
        }
      }
      MessageRecord rec;
      rec.id = "s" + std::to_string(++ordinal);
      rec.text = join_tokens(tokens);
      rec.label = label_from_index(c);
      corpus.append(std::move(rec));
    }
  }
  return corpus;
}

SynonymLexicon gen_synthetic_lexicon(const SyntheticSpec& spec) {
  spec.validate();
  SynonymLexicon lex;
  for (int pool = 0; pool <= kNumClasses; ++pool) {
    const int size =
        pool == kNumClasses ? spec.shared_pool_size : spec.class_pool_size;
    for (int i = 0; i < size; ++i) {
      lex.entries[synthetic_token(pool, i)] = {
          synthetic_token(pool, (i + 1) % size),
          synthetic_token(pool, (i + size - 1) % size)};
    }
  }
  return lex;
}

}  // namespace codemix

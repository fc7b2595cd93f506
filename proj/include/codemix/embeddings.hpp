#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "codemix/errors.hpp"
#include "codemix/linalg.hpp"
#include "codemix/rng.hpp"

namespace codemix {

// Pre-trained word vectors parsed from GloVe-style text: one line per token,
// token followed by `dimension` decimal components.
struct EmbeddingTable {
  int dimension = 0;
  bool trainable = true;
  std::unordered_map<std::string, std::vector<double>> vectors;
};

EmbeddingTable load_embeddings(const std::string& path, int expected_dimension,
                               std::vector<std::string>* warnings = nullptr);

// Task vocabulary. Index 0 is padding, index 1 the unknown marker; corpus
// tokens start at 2, ordered by descending frequency then lexicographically.
class Vocabulary {
 public:
  static constexpr int kPadIndex = 0;
  static constexpr int kUnkIndex = 1;
  static constexpr const char* kPadToken = "<pad>";
  static constexpr const char* kUnkToken = "<unk>";

  Vocabulary();

  int index_of(const std::string& token) const {
    auto it = token_to_index_.find(token);
    return it == token_to_index_.end() ? kUnkIndex : it->second;
  }
  const std::string& token_at(int index) const;
  int size() const { return static_cast<int>(index_to_token_.size()); }

  // Fingerprint over "token\tindex\n" lines in index order.
  std::string hash() const;

  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

  friend Vocabulary build_vocab(
      const std::vector<std::vector<std::string>>& documents,
      int min_frequency);

 private:
  void add(std::string token);

  std::unordered_map<std::string, int> token_to_index_;
  std::vector<std::string> index_to_token_;
};

Vocabulary build_vocab(const std::vector<std::vector<std::string>>& documents,
                       int min_frequency = 1);

// Fixed-length index encoding: head-truncated at max_length, right-padded
// with the padding index.
struct EncodedSequence {
  std::vector<int> indices;
  int true_length = 0;
};

EncodedSequence encode_sequence(const std::vector<std::string>& tokens,
                                const Vocabulary& vocab, int max_length);

// First true_length tokens, OOV positions as the unknown marker.
std::vector<std::string> decode_sequence(const EncodedSequence& seq,
                                         const Vocabulary& vocab);

// Row per vocabulary entry: copied from the table when present, otherwise
// uniform in [-0.25, 0.25]; the padding row stays zero.
template <typename Scalar>
MatrixX<Scalar> build_embedding_matrix(const Vocabulary& vocab,
                                       const EmbeddingTable& table,
                                       SeededRng& rng) {
  if (table.dimension <= 0) throw ConfigError("embedding dimension must be positive");
  MatrixX<Scalar> matrix(vocab.size(), table.dimension);
  matrix.row(Vocabulary::kPadIndex).setZero();
  for (int i = 1; i < vocab.size(); ++i) {
    auto it = table.vectors.find(vocab.token_at(i));
    if (it != table.vectors.end()) {
      for (int j = 0; j < table.dimension; ++j) {
        matrix(i, j) = static_cast<Scalar>(it->second[j]);
      }
    } else {
      for (int j = 0; j < table.dimension; ++j) {
        matrix(i, j) = static_cast<Scalar>(rng.uniform(-0.25, 0.25));
      }
    }
  }
  return matrix;
}

}  // namespace codemix

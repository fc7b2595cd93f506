#pragma once

#include <vector>

#include "codemix/model.hpp"

namespace testutil {

// Small model over a synthetic vocabulary for unit tests; embeddings are
// random-initialized (no pretrained table).
template <typename Scalar>
codemix::Model<Scalar> make_test_model(codemix::CellKind kind, int units,
                                       int dim, int vocab_size, int max_length,
                                       std::vector<int> dense,
                                       std::uint64_t seed,
                                       double dropout = 0.0,
                                       bool trainable = true) {
  codemix::ModelConfig config;
  config.cell_kind = kind;
  config.hidden_units = units;
  config.embedding_dimension = dim;
  config.max_length = max_length;
  config.dense_layers = std::move(dense);
  config.recurrent_dropout = dropout;
  config.embeddings_trainable = trainable;
  config.seed = seed;

  codemix::SeededRng rng(seed);
  codemix::MatrixX<Scalar> embedding(vocab_size, dim);
  embedding.row(0).setZero();
  for (int i = 1; i < vocab_size; ++i) {
    for (int j = 0; j < dim; ++j) {
      embedding(i, j) = static_cast<Scalar>(rng.uniform(-0.25, 0.25));
    }
  }
  return codemix::init_model(config, embedding, rng);
}

inline codemix::EncodedSequence make_sequence(std::vector<int> indices,
                                              int true_length) {
  codemix::EncodedSequence seq;
  seq.indices = std::move(indices);
  seq.true_length = true_length;
  return seq;
}

}  // namespace testutil

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "codemix/corpus.hpp"
#include "codemix/embeddings.hpp"
#include "codemix/errors.hpp"
#include "codemix/linalg.hpp"
#include "codemix/rng.hpp"

namespace codemix {

enum class CellKind { SimpleRNN, LSTM, GRU, BiLSTM };

std::string cell_kind_name(CellKind kind);
CellKind cell_kind_from_name(const std::string& name);

inline int gate_count(CellKind kind) {
  switch (kind) {
    case CellKind::SimpleRNN: return 1;
    case CellKind::GRU: return 3;
    default: return 4;  // LSTM and each BiLSTM direction
  }
}

inline int direction_count(CellKind kind) {
  return kind == CellKind::BiLSTM ? 2 : 1;
}

struct ModelConfig {
  CellKind cell_kind = CellKind::BiLSTM;
  int hidden_units = 32;
  int embedding_dimension = 100;
  int max_length = 200;
  std::vector<int> dense_layers{64, 3};  // widths; the last one is the head
  double recurrent_dropout = 0.2;
  bool embeddings_trainable = true;
  std::uint64_t seed = 0;

  void validate() const;
  int encoder_output_dim() const {
    return hidden_units * direction_count(cell_kind);
  }
  std::string descriptor() const;

  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
};

template <typename Scalar>
struct RecurrentParams {
  MatrixX<Scalar> W;  // (gates*H, D) input kernel
  MatrixX<Scalar> U;  // (gates*H, H) recurrent kernel
  VectorX<Scalar> b;  // (gates*H)
};

template <typename Scalar>
struct DenseLayer {
  MatrixX<Scalar> W;  // (out, in)
  VectorX<Scalar> b;  // (out)
};

struct ModelMeta {
  std::string vocab_hash;
  std::string config_hash;
  std::uint64_t seed = 0;
};

template <typename Scalar>
struct Model {
  ModelConfig config;
  MatrixX<Scalar> embedding;  // (vocab, dim), one row per token
  std::vector<RecurrentParams<Scalar>> cells;  // one per direction
  std::vector<DenseLayer<Scalar>> dense;
  ModelMeta meta;

  int vocab_size() const { return static_cast<int>(embedding.rows()); }

  // Visits every parameter tensor in a stable order. F is called with
  // (name, Eigen::Ref<MatrixX<Scalar>>); vectors appear as n-by-1 blocks.
  template <typename F>
  void for_each_tensor(F&& f) {
    f(std::string("embedding"), Eigen::Ref<MatrixX<Scalar>>(embedding));
    for (std::size_t d = 0; d < cells.size(); ++d) {
      const std::string p = "rnn" + std::to_string(d);
      f(p + ".W", Eigen::Ref<MatrixX<Scalar>>(cells[d].W));
      f(p + ".U", Eigen::Ref<MatrixX<Scalar>>(cells[d].U));
      f(p + ".b", Eigen::Ref<MatrixX<Scalar>>(cells[d].b));
    }
    for (std::size_t k = 0; k < dense.size(); ++k) {
      const std::string p = "dense" + std::to_string(k);
      f(p + ".W", Eigen::Ref<MatrixX<Scalar>>(dense[k].W));
      f(p + ".b", Eigen::Ref<MatrixX<Scalar>>(dense[k].b));
    }
  }

  template <typename F>
  void for_each_tensor(F&& f) const {
    f(std::string("embedding"), Eigen::Ref<const MatrixX<Scalar>>(embedding));
    for (std::size_t d = 0; d < cells.size(); ++d) {
      const std::string p = "rnn" + std::to_string(d);
      f(p + ".W", Eigen::Ref<const MatrixX<Scalar>>(cells[d].W));
      f(p + ".U", Eigen::Ref<const MatrixX<Scalar>>(cells[d].U));
      f(p + ".b", Eigen::Ref<const MatrixX<Scalar>>(cells[d].b));
    }
    for (std::size_t k = 0; k < dense.size(); ++k) {
      const std::string p = "dense" + std::to_string(k);
      f(p + ".W", Eigen::Ref<const MatrixX<Scalar>>(dense[k].W));
      f(p + ".b", Eigen::Ref<const MatrixX<Scalar>>(dense[k].b));
    }
  }

  std::size_t parameter_count() const {
    std::size_t n = static_cast<std::size_t>(embedding.size());
    for (const auto& c : cells) {
      n += static_cast<std::size_t>(c.W.size() + c.U.size() + c.b.size());
    }
    for (const auto& l : dense) {
      n += static_cast<std::size_t>(l.W.size() + l.b.size());
    }
    return n;
  }
};

// Gradients mirror the model's tensors; the embedding slot stays zero when
// embeddings are frozen.
template <typename Scalar>
struct Gradients {
  MatrixX<Scalar> embedding;
  std::vector<RecurrentParams<Scalar>> cells;
  std::vector<DenseLayer<Scalar>> dense;

  template <typename F>
  void for_each_tensor(F&& f) {
    f(std::string("embedding"), Eigen::Ref<MatrixX<Scalar>>(embedding));
    for (std::size_t d = 0; d < cells.size(); ++d) {
      const std::string p = "rnn" + std::to_string(d);
      f(p + ".W", Eigen::Ref<MatrixX<Scalar>>(cells[d].W));
      f(p + ".U", Eigen::Ref<MatrixX<Scalar>>(cells[d].U));
      f(p + ".b", Eigen::Ref<MatrixX<Scalar>>(cells[d].b));
    }
    for (std::size_t k = 0; k < dense.size(); ++k) {
      const std::string p = "dense" + std::to_string(k);
      f(p + ".W", Eigen::Ref<MatrixX<Scalar>>(dense[k].W));
      f(p + ".b", Eigen::Ref<MatrixX<Scalar>>(dense[k].b));
    }
  }

  bool all_finite() const {
    if (!embedding.allFinite()) return false;
    for (const auto& c : cells) {
      if (!c.W.allFinite() || !c.U.allFinite() || !c.b.allFinite())
        return false;
    }
    for (const auto& l : dense) {
      if (!l.W.allFinite() || !l.b.allFinite()) return false;
    }
    return true;
  }
};

template <typename Scalar>
Gradients<Scalar> make_zero_gradients(const Model<Scalar>& model) {
  Gradients<Scalar> g;
  g.embedding = MatrixX<Scalar>::Zero(model.embedding.rows(),
                                      model.embedding.cols());
  for (const auto& c : model.cells) {
    g.cells.push_back({MatrixX<Scalar>::Zero(c.W.rows(), c.W.cols()),
                       MatrixX<Scalar>::Zero(c.U.rows(), c.U.cols()),
                       VectorX<Scalar>::Zero(c.b.size())});
  }
  for (const auto& l : model.dense) {
    g.dense.push_back({MatrixX<Scalar>::Zero(l.W.rows(), l.W.cols()),
                       VectorX<Scalar>::Zero(l.b.size())});
  }
  return g;
}

namespace detail {

// QR-based orthogonal init with deterministic sign correction.
template <typename Scalar>
MatrixX<Scalar> orthogonal_matrix(int n, SeededRng& rng) {
  MatrixX<double> a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<MatrixX<double>> qr(a);
  MatrixX<double> q = qr.householderQ() * MatrixX<double>::Identity(n, n);
  MatrixX<double> r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q.template cast<Scalar>();
}

template <typename Scalar>
void glorot_fill(Eigen::Ref<MatrixX<Scalar>> block, int fan_in, int fan_out,
                 SeededRng& rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  for (Eigen::Index i = 0; i < block.rows(); ++i) {
    for (Eigen::Index j = 0; j < block.cols(); ++j) {
      block(i, j) = static_cast<Scalar>(rng.uniform(-limit, limit));
    }
  }
}

}  // namespace detail

template <typename Scalar>
Model<Scalar> init_model(const ModelConfig& config,
                         const MatrixX<Scalar>& embedding_matrix,
                         SeededRng& rng) {
  config.validate();
  if (embedding_matrix.cols() != config.embedding_dimension) {
    throw ConfigError("embedding matrix has " +
                      std::to_string(embedding_matrix.cols()) +
                      " columns but config.embedding_dimension is " +
                      std::to_string(config.embedding_dimension));
  }
  Model<Scalar> model;
  model.config = config;
  model.embedding = embedding_matrix;

  const int H = config.hidden_units;
  const int D = config.embedding_dimension;
  const int gates = gate_count(config.cell_kind);
  const bool lstm_like = gates == 4;
  for (int d = 0; d < direction_count(config.cell_kind); ++d) {
    RecurrentParams<Scalar> p;
    p.W.resize(gates * H, D);
    p.U.resize(gates * H, H);
    p.b = VectorX<Scalar>::Zero(gates * H);
    for (int g = 0; g < gates; ++g) {
      detail::glorot_fill<Scalar>(p.W.middleRows(g * H, H), D, H, rng);
    }
    for (int g = 0; g < gates; ++g) {
      p.U.middleRows(g * H, H) = detail::orthogonal_matrix<Scalar>(H, rng);
    }
    if (lstm_like) {
      p.b.segment(H, H).setOnes();  // forget gate bias
    }
    model.cells.push_back(std::move(p));
  }

  int in = config.encoder_output_dim();
  for (int width : config.dense_layers) {
    DenseLayer<Scalar> layer;
    layer.W.resize(width, in);
    detail::glorot_fill<Scalar>(layer.W, in, width, rng);
    layer.b = VectorX<Scalar>::Zero(width);
    model.dense.push_back(std::move(layer));
    in = width;
  }
  return model;
}

enum class RunMode { Train, Eval };

// Variational recurrent dropout: one inverted-scale mask per example per
// direction, reused across timesteps and gates on the hidden state entering
// the recurrent kernels.
template <typename Scalar>
struct DropoutMasks {
  std::vector<std::vector<VectorX<Scalar>>> per_example;  // [example][dir]
};

template <typename Scalar>
DropoutMasks<Scalar> draw_dropout_masks(const Model<Scalar>& model,
                                        std::size_t batch_size,
                                        SeededRng& rng) {
  const double p = model.config.recurrent_dropout;
  const double keep = 1.0 - p;
  DropoutMasks<Scalar> masks;
  masks.per_example.resize(batch_size);
  for (auto& dirs : masks.per_example) {
    dirs.resize(model.cells.size());
    for (auto& mask : dirs) {
      mask.resize(model.config.hidden_units);
      for (int i = 0; i < model.config.hidden_units; ++i) {
        mask[i] =
            rng.uniform() < keep ? static_cast<Scalar>(1.0 / keep) : Scalar(0);
      }
    }
  }
  return masks;
}

template <typename Scalar>
struct ExampleCache {
  EncodedSequence seq;
  struct DirectionTrace {
    VectorX<Scalar> mask;               // empty in eval mode
    std::vector<VectorX<Scalar>> h;     // hidden state per processed step
    std::vector<VectorX<Scalar>> c;     // LSTM cell state per step
    std::vector<VectorX<Scalar>> gates; // post-activation gate stack per step
  };
  std::vector<DirectionTrace> dirs;
  std::vector<VectorX<Scalar>> dense_in;  // input of each dense layer
  VectorX<Scalar> probs;
};

template <typename Scalar>
struct ForwardCache {
  std::vector<ExampleCache<Scalar>> examples;
  CellKind cell_kind = CellKind::SimpleRNN;
  int hidden_units = 0;
};

namespace detail {

// Processing-order timestep positions for a direction.
inline std::vector<int> step_positions(int true_length, int direction) {
  std::vector<int> ts(true_length);
  for (int s = 0; s < true_length; ++s) {
    ts[s] = direction == 0 ? s : true_length - 1 - s;
  }
  return ts;
}

template <typename Scalar>
VectorX<Scalar> softmax(const VectorX<Scalar>& logits) {
  VectorX<Scalar> shifted = logits.array() - logits.maxCoeff();
  VectorX<Scalar> e = shifted.array().exp();
  return e / e.sum();
}

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  return Scalar(1) / (Scalar(1) + std::exp(-x));
}

}  // namespace detail

// Runs the network over a batch. When `masks` is null the encoder applies no
// dropout (eval semantics). Probability rows sum to one; padding timesteps
// beyond true_length are never read.
template <typename Scalar>
MatrixX<Scalar> forward_with_masks(const Model<Scalar>& model,
                                   std::span<const EncodedSequence> batch,
                                   const DropoutMasks<Scalar>* masks,
                                   ForwardCache<Scalar>* cache) {
  const ModelConfig& cfg = model.config;
  const int H = cfg.hidden_units;
  const CellKind kind = cfg.cell_kind;
  const bool lstm_like = gate_count(kind) == 4;
  if (masks && masks->per_example.size() != batch.size()) {
    throw DataError("dropout masks do not match batch size");
  }

  MatrixX<Scalar> probs(static_cast<Eigen::Index>(batch.size()), kNumClasses);
  if (cache) {
    cache->examples.clear();
    cache->examples.resize(batch.size());
    cache->cell_kind = kind;
    cache->hidden_units = H;
  }

  for (std::size_t n = 0; n < batch.size(); ++n) {
    const EncodedSequence& seq = batch[n];
    const int T = seq.true_length;
    if (static_cast<int>(seq.indices.size()) < T) {
      throw DataError("encoded sequence shorter than its true_length");
    }
    ExampleCache<Scalar>* ex = cache ? &cache->examples[n] : nullptr;
    if (ex) {
      ex->seq = seq;
      ex->dirs.resize(model.cells.size());
    }

    VectorX<Scalar> encoder_out(cfg.encoder_output_dim());
    for (std::size_t d = 0; d < model.cells.size(); ++d) {
      const RecurrentParams<Scalar>& par = model.cells[d];
      const VectorX<Scalar>* mask =
          masks ? &masks->per_example[n][d] : nullptr;
      auto* trace = ex ? &ex->dirs[d] : nullptr;
      if (trace && mask) trace->mask = *mask;

      VectorX<Scalar> h = VectorX<Scalar>::Zero(H);
      VectorX<Scalar> c = VectorX<Scalar>::Zero(H);
      const auto ts = detail::step_positions(T, static_cast<int>(d));
      for (int s = 0; s < T; ++s) {
        const int idx = seq.indices[ts[s]];
        if (idx < 0 || idx >= model.vocab_size()) {
          throw DataError("token index out of range: " + std::to_string(idx));
        }
        VectorX<Scalar> x = model.embedding.row(idx).transpose();
        VectorX<Scalar> hd = mask ? mask->cwiseProduct(h).eval() : h;

        if (kind == CellKind::SimpleRNN) {
          h = (par.W * x + par.U * hd + par.b).array().tanh();
          if (trace) trace->h.push_back(h);
        } else if (lstm_like) {
          VectorX<Scalar> z = par.W * x + par.U * hd + par.b;
          VectorX<Scalar> act(4 * H);
          for (int i = 0; i < H; ++i) {
            act[i] = detail::sigmoid(z[i]);                    // input
            act[H + i] = detail::sigmoid(z[H + i]);            // forget
            act[2 * H + i] = std::tanh(z[2 * H + i]);          // candidate
            act[3 * H + i] = detail::sigmoid(z[3 * H + i]);    // output
          }
          VectorX<Scalar> c_new =
              act.segment(H, H).cwiseProduct(c) +
              act.segment(0, H).cwiseProduct(act.segment(2 * H, H));
          h = act.segment(3 * H, H)
                  .cwiseProduct(c_new.array().tanh().matrix());
          c = c_new;
          if (trace) {
            trace->gates.push_back(std::move(act));
            trace->c.push_back(c);
            trace->h.push_back(h);
          }
        } else {  // GRU
          VectorX<Scalar> az =
              par.W.middleRows(0, H) * x + par.U.middleRows(0, H) * hd +
              par.b.segment(0, H);
          VectorX<Scalar> ar =
              par.W.middleRows(H, H) * x + par.U.middleRows(H, H) * hd +
              par.b.segment(H, H);
          VectorX<Scalar> zg = az.unaryExpr([](Scalar v) {
            return detail::sigmoid(v);
          });
          VectorX<Scalar> rg = ar.unaryExpr([](Scalar v) {
            return detail::sigmoid(v);
          });
          VectorX<Scalar> ah = par.W.middleRows(2 * H, H) * x +
                               par.U.middleRows(2 * H, H) *
                                   rg.cwiseProduct(hd) +
                               par.b.segment(2 * H, H);
          VectorX<Scalar> hc = ah.array().tanh();
          VectorX<Scalar> h_new =
              zg.cwiseProduct(h) +
              (VectorX<Scalar>::Ones(H) - zg).cwiseProduct(hc);
          if (trace) {
            VectorX<Scalar> act(3 * H);
            act << zg, rg, hc;
            trace->gates.push_back(std::move(act));
            trace->h.push_back(h_new);
          }
          h = h_new;
        }
      }
      encoder_out.segment(static_cast<Eigen::Index>(d) * H, H) = h;
    }

    // Dense head: ReLU hidden layers, softmax output.
    VectorX<Scalar> v = encoder_out;
    if (ex) ex->dense_in.clear();
    for (std::size_t k = 0; k < model.dense.size(); ++k) {
      if (ex) ex->dense_in.push_back(v);
      VectorX<Scalar> pre = model.dense[k].W * v + model.dense[k].b;
      if (k + 1 < model.dense.size()) {
        v = pre.cwiseMax(Scalar(0));
      } else {
        v = detail::softmax(pre);
      }
    }
    probs.row(static_cast<Eigen::Index>(n)) = v.transpose();
    if (ex) ex->probs = v;
  }
  return probs;
}

template <typename Scalar>
MatrixX<Scalar> forward(const Model<Scalar>& model,
                        std::span<const EncodedSequence> batch, RunMode mode,
                        SeededRng* rng = nullptr,
                        ForwardCache<Scalar>* cache = nullptr,
                        DropoutMasks<Scalar>* masks_out = nullptr) {
  if (mode == RunMode::Train) {
    if (!rng) throw ConfigError("train-mode forward needs a generator");
    DropoutMasks<Scalar> masks = draw_dropout_masks(model, batch.size(), *rng);
    auto probs = forward_with_masks(model, batch, &masks, cache);
    if (masks_out) *masks_out = std::move(masks);
    return probs;
  }
  return forward_with_masks<Scalar>(model, batch, nullptr, cache);
}

struct LossValue {
  double value = 0.0;
  std::vector<double> per_example;
};

// Categorical cross-entropy, mean over the batch; probabilities are clipped
// to [1e-12, 1 - 1e-12] before the log.
template <typename Scalar>
LossValue loss(const MatrixX<Scalar>& probabilities,
               const std::vector<ClassLabel>& labels) {
  if (static_cast<std::size_t>(probabilities.rows()) != labels.size()) {
    throw DataError("probability rows (" +
                    std::to_string(probabilities.rows()) +
                    ") do not match label count (" +
                    std::to_string(labels.size()) + ")");
  }
  constexpr double kEps = 1e-12;
  LossValue out;
  out.per_example.reserve(labels.size());
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    double p = static_cast<double>(
        probabilities(static_cast<Eigen::Index>(i), label_index(labels[i])));
    p = std::min(std::max(p, kEps), 1.0 - kEps);
    double l = -std::log(p);
    out.per_example.push_back(l);
    total += l;
  }
  out.value = labels.empty() ? 0.0 : total / static_cast<double>(labels.size());
  return out;
}

// Backpropagation through time over a train-mode forward cache. The
// embedding gradient stays zero when embeddings are frozen.
template <typename Scalar>
Gradients<Scalar> backward(const Model<Scalar>& model,
                           const ForwardCache<Scalar>& cache,
                           const std::vector<ClassLabel>& labels) {
  if (cache.examples.size() != labels.size()) {
    throw DataError("cache does not match label count");
  }
  if (cache.cell_kind != model.config.cell_kind ||
      cache.hidden_units != model.config.hidden_units) {
    throw DataError("stale forward cache: model configuration changed");
  }
  const int H = model.config.hidden_units;
  const CellKind kind = model.config.cell_kind;
  const bool lstm_like = gate_count(kind) == 4;
  const Scalar inv_n = Scalar(1) / static_cast<Scalar>(labels.size());

  Gradients<Scalar> grads = make_zero_gradients(model);

  for (std::size_t n = 0; n < cache.examples.size(); ++n) {
    const ExampleCache<Scalar>& ex = cache.examples[n];
    if (ex.dense_in.size() != model.dense.size()) {
      throw DataError("stale forward cache: dense stack changed");
    }

    // Softmax + cross-entropy head.
    VectorX<Scalar> g = ex.probs;
    g[label_index(labels[n])] -= Scalar(1);
    g *= inv_n;

    for (std::size_t k = model.dense.size(); k-- > 0;) {
      grads.dense[k].W += g * ex.dense_in[k].transpose();
      grads.dense[k].b += g;
      VectorX<Scalar> gprev = model.dense[k].W.transpose() * g;
      if (k == 0) {
        g = std::move(gprev);
        break;
      }
      // ReLU derivative from the stored layer input (its output feeds k).
      g = gprev.cwiseProduct(
          ex.dense_in[k]
              .unaryExpr([](Scalar v) { return v > Scalar(0) ? Scalar(1)
                                                             : Scalar(0); }));
    }
    // g now holds the gradient w.r.t. the encoder output.

    const int T = ex.seq.true_length;
    for (std::size_t d = 0; d < model.cells.size(); ++d) {
      const RecurrentParams<Scalar>& par = model.cells[d];
      auto& gpar = grads.cells[d];
      const auto& trace = ex.dirs[d];
      const bool has_mask = trace.mask.size() > 0;
      const auto ts = detail::step_positions(T, static_cast<int>(d));

      VectorX<Scalar> dh = g.segment(static_cast<Eigen::Index>(d) * H, H);
      VectorX<Scalar> dc = VectorX<Scalar>::Zero(H);
      for (int s = T - 1; s >= 0; --s) {
        const int idx = ex.seq.indices[ts[s]];
        VectorX<Scalar> x = model.embedding.row(idx).transpose();
        VectorX<Scalar> h_prev =
            s > 0 ? trace.h[s - 1] : VectorX<Scalar>::Zero(H);
        VectorX<Scalar> hd =
            has_mask ? trace.mask.cwiseProduct(h_prev).eval() : h_prev;
        VectorX<Scalar> dx(model.config.embedding_dimension);

        if (kind == CellKind::SimpleRNN) {
          const VectorX<Scalar>& h = trace.h[s];
          VectorX<Scalar> da = dh.cwiseProduct(
              (VectorX<Scalar>::Ones(H) - h.cwiseProduct(h)));
          gpar.W += da * x.transpose();
          gpar.U += da * hd.transpose();
          gpar.b += da;
          VectorX<Scalar> dhd = par.U.transpose() * da;
          dh = has_mask ? trace.mask.cwiseProduct(dhd).eval() : dhd;
          dx = par.W.transpose() * da;
        } else if (lstm_like) {
          const VectorX<Scalar>& act = trace.gates[s];
          auto ig = act.segment(0, H);
          auto fg = act.segment(H, H);
          auto gg = act.segment(2 * H, H);
          auto og = act.segment(3 * H, H);
          const VectorX<Scalar>& c = trace.c[s];
          VectorX<Scalar> c_prev =
              s > 0 ? trace.c[s - 1] : VectorX<Scalar>::Zero(H);
          VectorX<Scalar> tc = c.array().tanh();

          VectorX<Scalar> dz(4 * H);
          VectorX<Scalar> dcs =
              dc + dh.cwiseProduct(og).cwiseProduct(
                       (VectorX<Scalar>::Ones(H) - tc.cwiseProduct(tc)));
          for (int i = 0; i < H; ++i) {
            Scalar d_o = dh[i] * tc[i];
            dz[3 * H + i] = d_o * og[i] * (Scalar(1) - og[i]);
            Scalar d_f = dcs[i] * c_prev[i];
            dz[H + i] = d_f * fg[i] * (Scalar(1) - fg[i]);
            Scalar d_i = dcs[i] * gg[i];
            dz[i] = d_i * ig[i] * (Scalar(1) - ig[i]);
            Scalar d_g = dcs[i] * ig[i];
            dz[2 * H + i] = d_g * (Scalar(1) - gg[i] * gg[i]);
          }
          gpar.W += dz * x.transpose();
          gpar.U += dz * hd.transpose();
          gpar.b += dz;
          VectorX<Scalar> dhd = par.U.transpose() * dz;
          dh = has_mask ? trace.mask.cwiseProduct(dhd).eval() : dhd;
          dc = dcs.cwiseProduct(fg);
          dx = par.W.transpose() * dz;
        } else {  // GRU
          const VectorX<Scalar>& act = trace.gates[s];
          auto zg = act.segment(0, H);
          auto rg = act.segment(H, H);
          auto hc = act.segment(2 * H, H);
          VectorX<Scalar> rhd = rg.cwiseProduct(hd);

          VectorX<Scalar> da_z(H), da_h(H);
          for (int i = 0; i < H; ++i) {
            Scalar d_zg = dh[i] * (h_prev[i] - hc[i]);
            da_z[i] = d_zg * zg[i] * (Scalar(1) - zg[i]);
            Scalar d_hc = dh[i] * (Scalar(1) - zg[i]);
            da_h[i] = d_hc * (Scalar(1) - hc[i] * hc[i]);
          }
          VectorX<Scalar> d_rhd =
              par.U.middleRows(2 * H, H).transpose() * da_h;
          VectorX<Scalar> da_r(H);
          for (int i = 0; i < H; ++i) {
            Scalar d_rg = d_rhd[i] * hd[i];
            da_r[i] = d_rg * rg[i] * (Scalar(1) - rg[i]);
          }
          VectorX<Scalar> d_hd =
              d_rhd.cwiseProduct(rg) +
              par.U.middleRows(0, H).transpose() * da_z +
              par.U.middleRows(H, H).transpose() * da_r;

          gpar.W.middleRows(0, H) += da_z * x.transpose();
          gpar.W.middleRows(H, H) += da_r * x.transpose();
          gpar.W.middleRows(2 * H, H) += da_h * x.transpose();
          gpar.U.middleRows(0, H) += da_z * hd.transpose();
          gpar.U.middleRows(H, H) += da_r * hd.transpose();
          gpar.U.middleRows(2 * H, H) += da_h * rhd.transpose();
          gpar.b.segment(0, H) += da_z;
          gpar.b.segment(H, H) += da_r;
          gpar.b.segment(2 * H, H) += da_h;

          dh = dh.cwiseProduct(zg) +
               (has_mask ? trace.mask.cwiseProduct(d_hd).eval() : d_hd);
          dx = par.W.middleRows(0, H).transpose() * da_z +
               par.W.middleRows(H, H).transpose() * da_r +
               par.W.middleRows(2 * H, H).transpose() * da_h;
        }

        if (model.config.embeddings_trainable) {
          grads.embedding.row(idx) += dx.transpose();
        }
      }
    }
  }
  return grads;
}

// Eval-mode single-sequence prediction; ties resolve to the lowest class
// index.
template <typename Scalar>
std::pair<ClassLabel, VectorX<Scalar>> predict(const Model<Scalar>& model,
                                               const EncodedSequence& seq) {
  MatrixX<Scalar> probs =
      forward<Scalar>(model, std::span(&seq, 1), RunMode::Eval);
  int best = 0;
  for (int c = 1; c < kNumClasses; ++c) {
    if (probs(0, c) > probs(0, best)) best = c;
  }
  return {label_from_index(best), probs.row(0).transpose()};
}

}  // namespace codemix

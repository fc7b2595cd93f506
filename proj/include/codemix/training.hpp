#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "codemix/model.hpp"

namespace codemix {

enum class OptimizerKind { Sgd, Adam };

std::string optimizer_kind_name(OptimizerKind kind);
OptimizerKind optimizer_kind_from_name(const std::string& name);

struct TrainingSchedule {
  double initial_learning_rate = 0.01;
  int epochs = 50;
  int batch_size = 32;
  double lr_decay = 1.0;  // per-epoch multiplicative factor; 1.0 disables
  int plateau_patience = 3;
  double plateau_factor = 0.5;
  int early_stop_patience = 10;
  double min_delta = 1e-4;
  std::string checkpoint_path;
  OptimizerKind optimizer = OptimizerKind::Adam;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double learning_rate = 0.0;  // rate used during this epoch
  bool lr_reduced = false;     // plateau reduction fired after this epoch
  bool checkpointed = false;
  bool stopped_early = false;
};

struct TrainingHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double best_val_loss = std::numeric_limits<double>::infinity();
};

void write_history_jsonl(const TrainingHistory& history,
                         const std::string& path,
                         const std::string& config_hash, std::uint64_t seed);
TrainingHistory read_history_jsonl(const std::string& path);

// Improvement / plateau / early-stop bookkeeping, kept separate from the
// optimization loop so schedule semantics can be tested with stubbed
// validation losses. Patience counters reset on val_loss < best - min_delta;
// checkpointing tracks the raw minimum so the restored model really is the
// one with the lowest validation loss.
class LoopController {
 public:
  LoopController(int plateau_patience, double plateau_factor,
                 int early_stop_patience, double min_delta)
      : plateau_patience_(plateau_patience),
        plateau_factor_(plateau_factor),
        early_stop_patience_(early_stop_patience),
        min_delta_(min_delta) {}

  struct Decision {
    bool improved = false;     // beat best by more than min_delta
    bool new_minimum = false;  // beat the raw minimum (checkpoint trigger)
    bool reduce_lr = false;
    bool stop = false;
  };

  Decision observe(int epoch, double val_loss) {
    Decision d;
    if (val_loss < minimum_) {
      minimum_ = val_loss;
      best_epoch_ = epoch;
      d.new_minimum = true;
    }
    if (val_loss < gated_best_ - min_delta_) {
      gated_best_ = val_loss;
      stall_ = 0;
      plateau_wait_ = 0;
      d.improved = true;
      return d;
    }
    ++stall_;
    ++plateau_wait_;
    if (plateau_wait_ >= plateau_patience_) {
      d.reduce_lr = true;
      plateau_wait_ = 0;
    }
    if (stall_ >= early_stop_patience_) d.stop = true;
    return d;
  }

  double plateau_factor() const { return plateau_factor_; }
  double best() const { return minimum_; }
  int best_epoch() const { return best_epoch_; }

 private:
  int plateau_patience_;
  double plateau_factor_;
  int early_stop_patience_;
  double min_delta_;
  double minimum_ = std::numeric_limits<double>::infinity();
  double gated_best_ = std::numeric_limits<double>::infinity();
  int best_epoch_ = 0;
  int stall_ = 0;
  int plateau_wait_ = 0;
};

// Adam (beta1 0.9, beta2 0.999, eps 1e-8) with a plain-SGD mode whose update
// rule stays analytically checkable. Frozen tensors are skipped.
template <typename Scalar>
class Optimizer {
 public:
  explicit Optimizer(OptimizerKind kind) : kind_(kind) {}

  OptimizerKind kind() const { return kind_; }

  void gradient_step(Model<Scalar>& model, Gradients<Scalar>& grads,
                     double learning_rate) {
    if (!grads.all_finite()) {
      throw NumericError("non-finite gradient encountered");
    }
    using TensorRef = std::pair<std::string, Eigen::Ref<MatrixX<Scalar>>>;
    std::vector<TensorRef> params;
    std::vector<TensorRef> gs;
    model.for_each_tensor([&](const std::string& n,
                              Eigen::Ref<MatrixX<Scalar>> t) {
      params.emplace_back(n, t);
    });
    grads.for_each_tensor([&](const std::string& n,
                              Eigen::Ref<MatrixX<Scalar>> t) {
      gs.emplace_back(n, t);
    });
    const bool skip_embedding = !model.config.embeddings_trainable;

    if (kind_ == OptimizerKind::Sgd) {
      for (std::size_t i = 0; i < params.size(); ++i) {
        if (skip_embedding && params[i].first == "embedding") continue;
        params[i].second -=
            static_cast<Scalar>(learning_rate) * gs[i].second;
      }
      return;
    }
    ++step_;
    const double bias1 = 1.0 - std::pow(kBeta1, step_);
    const double bias2 = 1.0 - std::pow(kBeta2, step_);
    if (state_.size() < params.size()) state_.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      auto& param = params[i].second;
      auto& g = gs[i].second;
      auto& st = state_[i];
      if (st.m.size() == 0) {
        st.m = MatrixX<Scalar>::Zero(param.rows(), param.cols());
        st.v = MatrixX<Scalar>::Zero(param.rows(), param.cols());
      }
      if (skip_embedding && params[i].first == "embedding") continue;
      st.m = static_cast<Scalar>(kBeta1) * st.m +
             static_cast<Scalar>(1.0 - kBeta1) * g;
      st.v = static_cast<Scalar>(kBeta2) * st.v +
             static_cast<Scalar>(1.0 - kBeta2) * g.cwiseProduct(g);
      param.array() -=
          static_cast<Scalar>(learning_rate) *
          (st.m / static_cast<Scalar>(bias1)).array() /
          ((st.v / static_cast<Scalar>(bias2)).array().sqrt() +
           static_cast<Scalar>(kEps));
    }
  }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  struct State {
    MatrixX<Scalar> m;
    MatrixX<Scalar> v;
  };

  OptimizerKind kind_;
  long step_ = 0;
  std::vector<State> state_;
};

// Free-function form of the spec'd operation.
template <typename Scalar>
void gradient_step(Optimizer<Scalar>& optimizer, Model<Scalar>& model,
                   Gradients<Scalar>& grads, double learning_rate) {
  optimizer.gradient_step(model, grads, learning_rate);
}

struct EncodedDataset {
  std::vector<EncodedSequence> sequences;
  std::vector<ClassLabel> labels;

  std::size_t size() const { return sequences.size(); }
  bool empty() const { return sequences.empty(); }
};

void checkpoint_save_bytes(const std::string& path,
                           const nlohmann::json& header,
                           const std::string& payload);
nlohmann::json checkpoint_read_header(const std::string& path,
                                      std::ifstream* stream = nullptr,
                                      std::uint64_t* data_offset = nullptr);

template <typename Scalar>
constexpr const char* scalar_kind_name() {
  if constexpr (sizeof(Scalar) == 4) {
    return "f32";
  } else {
    return "f64";
  }
}

// Self-describing binary checkpoint: magic, version, a JSON header (config,
// vocabulary hash, tensor directory) and raw little-endian column-major
// tensor payloads. Byte layout is documented in the README.
template <typename Scalar>
void checkpoint_save(const Model<Scalar>& model, const std::string& path) {
  nlohmann::json header;
  header["format_version"] = 1;
  header["scalar"] = scalar_kind_name<Scalar>();
  header["config"] = model.config.to_json();
  header["meta"] = {{"vocab_hash", model.meta.vocab_hash},
                    {"config_hash", model.meta.config_hash},
                    {"seed", model.meta.seed}};
  header["vocab_size"] = model.vocab_size();

  nlohmann::json tensors = nlohmann::json::array();
  std::string payload;
  model.for_each_tensor(
      [&](const std::string& name, Eigen::Ref<const MatrixX<Scalar>> t) {
        const std::size_t bytes =
            static_cast<std::size_t>(t.size()) * sizeof(Scalar);
        tensors.push_back({{"name", name},
                           {"rows", t.rows()},
                           {"cols", t.cols()},
                           {"offset", payload.size()},
                           {"bytes", bytes}});
        payload.append(reinterpret_cast<const char*>(t.data()), bytes);
      });
  header["tensors"] = std::move(tensors);
  checkpoint_save_bytes(path, header, payload);
}

template <typename Scalar>
Model<Scalar> checkpoint_load(
    const std::string& path,
    const std::optional<std::string>& expected_vocab_hash = std::nullopt) {
  std::ifstream in;
  std::uint64_t data_offset = 0;
  nlohmann::json header = checkpoint_read_header(path, &in, &data_offset);

  const std::string scalar = header.at("scalar").get<std::string>();
  if (scalar != scalar_kind_name<Scalar>()) {
    throw DataError("checkpoint scalar kind is " + scalar + ", expected " +
                    std::string(scalar_kind_name<Scalar>()));
  }
  Model<Scalar> model;
  model.config = ModelConfig::from_json(header.at("config"));
  const auto& meta = header.at("meta");
  model.meta.vocab_hash = meta.at("vocab_hash").get<std::string>();
  model.meta.config_hash = meta.at("config_hash").get<std::string>();
  model.meta.seed = meta.at("seed").get<std::uint64_t>();
  if (expected_vocab_hash && *expected_vocab_hash != model.meta.vocab_hash) {
    throw DataError("checkpoint vocabulary hash " + model.meta.vocab_hash +
                    " does not match expected " + *expected_vocab_hash);
  }

  const int vocab = header.at("vocab_size").get<int>();
  const int H = model.config.hidden_units;
  const int D = model.config.embedding_dimension;
  const int gates = gate_count(model.config.cell_kind);
  model.embedding.resize(vocab, D);
  for (int d = 0; d < direction_count(model.config.cell_kind); ++d) {
    RecurrentParams<Scalar> p;
    p.W.resize(gates * H, D);
    p.U.resize(gates * H, H);
    p.b.resize(gates * H);
    model.cells.push_back(std::move(p));
  }
  int in_width = model.config.encoder_output_dim();
  for (int width : model.config.dense_layers) {
    DenseLayer<Scalar> l;
    l.W.resize(width, in_width);
    l.b.resize(width);
    model.dense.push_back(std::move(l));
    in_width = width;
  }

  std::size_t entry = 0;
  const auto& tensors = header.at("tensors");
  model.for_each_tensor([&](const std::string& name,
                            Eigen::Ref<MatrixX<Scalar>> t) {
    if (entry >= tensors.size()) {
      throw DataError("checkpoint is missing tensor '" + name + "'");
    }
    const auto& desc = tensors[entry++];
    if (desc.at("name").get<std::string>() != name ||
        desc.at("rows").get<Eigen::Index>() != t.rows() ||
        desc.at("cols").get<Eigen::Index>() != t.cols()) {
      throw DataError("checkpoint tensor mismatch at '" + name + "'");
    }
    in.seekg(static_cast<std::streamoff>(
        data_offset + desc.at("offset").get<std::uint64_t>()));
    in.read(reinterpret_cast<char*>(t.data()),
            static_cast<std::streamsize>(desc.at("bytes").get<std::size_t>()));
    if (!in) throw DataError("checkpoint payload truncated at '" + name + "'");
  });
  if (entry != tensors.size()) {
    throw DataError("checkpoint holds unexpected extra tensors");
  }
  return model;
}

std::string checkpoint_scalar_kind(const std::string& path);

// Optimization loop: seeded shuffling, per-batch Adam/SGD steps, per-epoch
// validation loss, reduce-LR-on-plateau, early stopping and best-checkpoint
// restoration. The model is left holding the best parameters.
template <typename Scalar>
TrainingHistory train(Model<Scalar>& model, const EncodedDataset& train_set,
                      const EncodedDataset& validation_set,
                      const TrainingSchedule& schedule) {
  schedule.validate();
  if (schedule.checkpoint_path.empty()) {
    throw ConfigError("train.checkpoint_path must be set");
  }
  if (train_set.empty()) throw DataError("training set is empty");
  if (validation_set.empty()) throw DataError("validation set is empty");
  if (train_set.sequences.size() != train_set.labels.size() ||
      validation_set.sequences.size() != validation_set.labels.size()) {
    throw DataError("dataset sequences and labels differ in length");
  }

  SeededRng rng(derive_seed(schedule.seed, "train-loop"));
  Optimizer<Scalar> optimizer(schedule.optimizer);
  LoopController controller(schedule.plateau_patience, schedule.plateau_factor,
                            schedule.early_stop_patience, schedule.min_delta);
  TrainingHistory history;
  double lr = schedule.initial_learning_rate;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= schedule.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(schedule.batch_size)) {
      const std::size_t stop = std::min(
          order.size(), start + static_cast<std::size_t>(schedule.batch_size));
      std::vector<EncodedSequence> batch;
      std::vector<ClassLabel> labels;
      batch.reserve(stop - start);
      for (std::size_t i = start; i < stop; ++i) {
        batch.push_back(train_set.sequences[order[i]]);
        labels.push_back(train_set.labels[order[i]]);
      }
      ForwardCache<Scalar> cache;
      MatrixX<Scalar> probs =
          forward<Scalar>(model, batch, RunMode::Train, &rng, &cache);
      LossValue batch_loss = loss(probs, labels);
      if (!std::isfinite(batch_loss.value)) {
        throw NumericError("non-finite training loss at epoch " +
                           std::to_string(epoch));
      }
      for (double l : batch_loss.per_example) loss_sum += l;
      Gradients<Scalar> grads = backward(model, cache, labels);
      optimizer.gradient_step(model, grads, lr);
    }
    const double train_loss = loss_sum / static_cast<double>(order.size());

    MatrixX<Scalar> val_probs = forward<Scalar>(
        model, std::span(validation_set.sequences), RunMode::Eval);
    const double val_loss = loss(val_probs, validation_set.labels).value;
    if (!std::isfinite(val_loss)) {
      throw NumericError("non-finite validation loss at epoch " +
                         std::to_string(epoch));
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = train_loss;
    record.val_loss = val_loss;
    record.learning_rate = lr;

    auto decision = controller.observe(epoch, val_loss);
    if (decision.improved) {
      checkpoint_save(model, schedule.checkpoint_path);
      record.checkpointed = true;
      history.best_epoch = epoch;
      history.best_val_loss = val_loss;
    }
    if (decision.reduce_lr) {
      lr *= schedule.plateau_factor;
      record.lr_reduced = true;
    }
    lr *= schedule.lr_decay;
    record.stopped_early = decision.stop;
    history.epochs.push_back(record);
    if (decision.stop) break;
  }

  // The first finite validation loss always improves on +inf, so a best
  // checkpoint exists whenever the loop ran.
  model = checkpoint_load<Scalar>(schedule.checkpoint_path);
  return history;
}

}  // namespace codemix

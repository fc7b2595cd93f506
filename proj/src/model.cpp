#include "codemix/model.hpp"

#include <sstream>

namespace codemix {

std::string cell_kind_name(CellKind kind) {
  switch (kind) {
    case CellKind::SimpleRNN: return "simplernn";
    case CellKind::LSTM: return "lstm";
    case CellKind::GRU: return "gru";
    case CellKind::BiLSTM: return "bilstm";
  }
  throw ConfigError("unknown cell kind");
}

CellKind cell_kind_from_name(const std::string& name) {
  std::string lower = name;
  for (char& c : lower) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  if (lower == "simplernn" || lower == "rnn") return CellKind::SimpleRNN;
  if (lower == "lstm") return CellKind::LSTM;
  if (lower == "gru") return CellKind::GRU;
  if (lower == "bilstm") return CellKind::BiLSTM;
  throw ConfigError("unknown cell kind '" + name +
                    "' (expected simplernn|lstm|gru|bilstm)");
}

void ModelConfig::validate() const {
  if (hidden_units < 1) throw ConfigError("model.hidden_units must be >= 1");
  if (embedding_dimension < 1) {
    throw ConfigError("model.embedding_dimension must be >= 1");
  }
  if (max_length < 1) throw ConfigError("model.max_length must be >= 1");
  if (dense_layers.empty() || dense_layers.back() != kNumClasses) {
    throw ConfigError("model.dense_layers must end in " +
                      std::to_string(kNumClasses));
  }
  for (int w : dense_layers) {
    if (w < 1) throw ConfigError("model.dense_layers widths must be >= 1");
  }
  if (recurrent_dropout < 0.0 || recurrent_dropout >= 1.0) {
    throw ConfigError("model.recurrent_dropout must be in [0, 1)");
  }
}

std::string ModelConfig::descriptor() const {
  std::ostringstream out;
  out << cell_kind_name(cell_kind) << "-" << hidden_units << "/d"
      << embedding_dimension << "/L" << max_length << "/drop"
      << recurrent_dropout << (embeddings_trainable ? "" : "/frozen");
  return out.str();
}

nlohmann::json ModelConfig::to_json() const {
  nlohmann::json j;
  j["cell_kind"] = cell_kind_name(cell_kind);
  j["hidden_units"] = hidden_units;
  j["embedding_dimension"] = embedding_dimension;
  j["max_length"] = max_length;
  j["dense_layers"] = dense_layers;
  j["recurrent_dropout"] = recurrent_dropout;
  j["embeddings_trainable"] = embeddings_trainable;
  j["seed"] = seed;
  return j;
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig cfg;
  cfg.cell_kind = cell_kind_from_name(j.at("cell_kind").get<std::string>());
  cfg.hidden_units = j.at("hidden_units").get<int>();
  cfg.embedding_dimension = j.at("embedding_dimension").get<int>();
  cfg.max_length = j.at("max_length").get<int>();
  cfg.dense_layers = j.at("dense_layers").get<std::vector<int>>();
  cfg.recurrent_dropout = j.at("recurrent_dropout").get<double>();
  cfg.embeddings_trainable = j.at("embeddings_trainable").get<bool>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.validate();
  return cfg;
}

}  // namespace codemix

#include "codemix/training.hpp"

namespace codemix {

namespace {

constexpr char kMagic[8] = {'C', 'M', 'X', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint32_t kFormatVersion = 1;

void write_u32(std::ofstream& out, std::uint32_t v) {
  char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 4);
}

void write_u64(std::ofstream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 8);
}

std::uint32_t read_u32(std::ifstream& in) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
  return v;
}

std::uint64_t read_u64(std::ifstream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

}  // namespace

std::string optimizer_kind_name(OptimizerKind kind) {
  return kind == OptimizerKind::Sgd ? "sgd" : "adam";
}

OptimizerKind optimizer_kind_from_name(const std::string& name) {
  if (name == "sgd") return OptimizerKind::Sgd;
  if (name == "adam") return OptimizerKind::Adam;
  throw ConfigError("unknown optimizer '" + name + "' (expected sgd|adam)");
}

void TrainingSchedule::validate() const {
  if (initial_learning_rate <= 0.0) {
    throw ConfigError("train.learning_rate must be > 0");
  }
  if (epochs < 1) throw ConfigError("train.epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (lr_decay <= 0.0 || lr_decay > 1.0) {
    throw ConfigError("train.lr_decay must be in (0, 1]");
  }
  if (plateau_patience < 1) {
    throw ConfigError("train.plateau_patience must be >= 1");
  }
  if (plateau_factor <= 0.0 || plateau_factor >= 1.0) {
    throw ConfigError("train.plateau_factor must be in (0, 1)");
  }
  if (early_stop_patience < 1) {
    throw ConfigError("train.early_stop_patience must be >= 1");
  }
  if (min_delta < 0.0) throw ConfigError("train.min_delta must be >= 0");
}

void checkpoint_save_bytes(const std::string& path,
                           const nlohmann::json& header,
                           const std::string& payload) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out.write(kMagic, sizeof(kMagic));
  write_u32(out, kFormatVersion);
  const std::string header_bytes = header.dump();
  write_u64(out, header_bytes.size());
  out.write(header_bytes.data(),
            static_cast<std::streamsize>(header_bytes.size()));
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw DataError("checkpoint write failed: " + path);
}

nlohmann::json checkpoint_read_header(const std::string& path,
                                      std::ifstream* stream,
                                      std::uint64_t* data_offset) {
  std::ifstream local;
  std::ifstream& in = stream ? *stream : local;
  in.open(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataError("not a checkpoint file: " + path);
  }
  const std::uint32_t version = read_u32(in);
  if (version != kFormatVersion) {
    throw DataError("checkpoint format version mismatch: file has " +
                    std::to_string(version) + ", this build reads " +
                    std::to_string(kFormatVersion));
  }
  const std::uint64_t header_len = read_u64(in);
  std::string header_bytes(header_len, '\0');
  in.read(header_bytes.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw DataError("checkpoint header truncated: " + path);
  if (data_offset) {
    *data_offset = sizeof(kMagic) + 4 + 8 + header_len;
  }
  try {
    return nlohmann::json::parse(header_bytes);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("bad checkpoint header: " + std::string(e.what()));
  }
}

std::string checkpoint_scalar_kind(const std::string& path) {
  return checkpoint_read_header(path).at("scalar").get<std::string>();
}

void write_history_jsonl(const TrainingHistory& history,
                         const std::string& path,
                         const std::string& config_hash, std::uint64_t seed) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write history: " + path);
  nlohmann::json head;
  head["config_hash"] = config_hash;
  head["seed"] = seed;
  head["best_epoch"] = history.best_epoch;
  head["best_val_loss"] = history.best_val_loss;
  out << head.dump() << "\n";
  for (const auto& r : history.epochs) {
    nlohmann::json j;
    j["epoch"] = r.epoch;
    j["train_loss"] = r.train_loss;
    j["val_loss"] = r.val_loss;
    j["learning_rate"] = r.learning_rate;
    j["lr_reduced"] = r.lr_reduced;
    j["checkpointed"] = r.checkpointed;
    j["stopped_early"] = r.stopped_early;
    out << j.dump() << "\n";
  }
  if (!out) throw DataError("history write failed: " + path);
}

TrainingHistory read_history_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open history: " + path);
  TrainingHistory history;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    if (first) {
      first = false;
      history.best_epoch = j.at("best_epoch").get<int>();
      history.best_val_loss = j.at("best_val_loss").get<double>();
      continue;
    }
    EpochRecord r;
    r.epoch = j.at("epoch").get<int>();
    r.train_loss = j.at("train_loss").get<double>();
    r.val_loss = j.at("val_loss").get<double>();
    r.learning_rate = j.at("learning_rate").get<double>();
    r.lr_reduced = j.at("lr_reduced").get<bool>();
    r.checkpointed = j.at("checkpointed").get<bool>();
    r.stopped_early = j.at("stopped_early").get<bool>();
    history.epochs.push_back(r);
  }
  if (first) throw DataError("empty history file: " + path);
  return history;
}

}  // namespace codemix

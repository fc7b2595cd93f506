#include "codemix/run_config.hpp"

#include <fstream>

namespace codemix {

namespace {

template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void RunConfig::validate() const {
  if (!(split.test_fraction > 0.0 && split.test_fraction < 1.0)) {
    throw ConfigError("split.test_fraction must be in (0, 1)");
  }
  augment.validate();
  if (embeddings.min_frequency < 1) {
    throw ConfigError("embeddings.min_frequency must be >= 1");
  }
  model.validate();
  if (precision != "f32" && precision != "f64") {
    throw ConfigError("precision must be f32 or f64");
  }
  schedule.validate();
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw ConfigError("train.val_fraction must be in (0, 1)");
  }
  synthetic.validate();
}

nlohmann::json RunConfig::to_json(bool include_paths) const {
  nlohmann::json j;
  j["data"] = {{"delimiter", std::string(1, data.delimiter)},
               {"labels", data.labels.names},
               {"has_header", data.has_header}};
  if (include_paths) {
    j["resources"] = {{"stopwords", resources.stopwords},
                      {"dictionary", resources.dictionary},
                      {"synonyms", resources.synonyms}};
  }
  nlohmann::json mult;
  for (const auto& [label, m] : augment.per_class_multipliers) {
    mult.push_back(m);
  }
  j["augment"] = {{"alpha", augment.alpha},
                  {"deletion_probability", augment.deletion_probability},
                  {"multipliers", mult},
                  {"seed", augment.seed}};
  if (augment.n_override) j["augment"]["n"] = *augment.n_override;
  j["split"] = {{"test_fraction", split.test_fraction}, {"seed", split.seed}};
  j["embeddings"] = {{"min_frequency", embeddings.min_frequency}};
  if (include_paths) j["embeddings"]["path"] = embeddings.path;
  j["model"] = model.to_json();
  j["precision"] = precision;
  j["train"] = {{"learning_rate", schedule.initial_learning_rate},
                {"epochs", schedule.epochs},
                {"batch_size", schedule.batch_size},
                {"lr_decay", schedule.lr_decay},
                {"plateau_patience", schedule.plateau_patience},
                {"plateau_factor", schedule.plateau_factor},
                {"early_stop_patience", schedule.early_stop_patience},
                {"min_delta", schedule.min_delta},
                {"optimizer", optimizer_kind_name(schedule.optimizer)},
                {"val_fraction", val_fraction},
                {"seed", schedule.seed}};
  j["synthetic"] = {{"per_class", synthetic.per_class},
                    {"class_pool_size", synthetic.class_pool_size},
                    {"shared_pool_size", synthetic.shared_pool_size},
                    {"overlap", synthetic.overlap},
                    {"min_length", synthetic.min_length},
                    {"max_length", synthetic.max_length},
                    {"seed", synthetic.seed}};
  return j;
}

std::string RunConfig::config_hash() const {
  return hex64(fnv1a64(to_json(/*include_paths=*/false).dump()));
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig cfg;
  if (j.contains("data")) {
    const auto& d = j.at("data");
    if (d.contains("delimiter")) {
      std::string delim = d.at("delimiter").get<std::string>();
      if (delim == "\\t" || delim == "tab") delim = "\t";
      if (delim.size() != 1) {
        throw ConfigError("data.delimiter must be a single character");
      }
      cfg.data.delimiter = delim[0];
    }
    if (d.contains("labels")) {
      auto names = d.at("labels").get<std::vector<std::string>>();
      if (names.size() != kNumClasses) {
        throw ConfigError("data.labels must list exactly 3 names");
      }
      for (int c = 0; c < kNumClasses; ++c) cfg.data.labels.names[c] = names[c];
    }
    maybe(d, "has_header", cfg.data.has_header);
  }
  if (j.contains("resources")) {
    const auto& r = j.at("resources");
    maybe(r, "stopwords", cfg.resources.stopwords);
    maybe(r, "dictionary", cfg.resources.dictionary);
    maybe(r, "synonyms", cfg.resources.synonyms);
  }
  if (j.contains("split")) {
    const auto& s = j.at("split");
    maybe(s, "test_fraction", cfg.split.test_fraction);
    maybe(s, "seed", cfg.split.seed);
  }
  if (j.contains("augment")) {
    const auto& a = j.at("augment");
    maybe(a, "alpha", cfg.augment.alpha);
    maybe(a, "deletion_probability", cfg.augment.deletion_probability);
    maybe(a, "seed", cfg.augment.seed);
    if (a.contains("n")) cfg.augment.n_override = a.at("n").get<int>();
    if (a.contains("multipliers")) {
      auto mult = a.at("multipliers").get<std::vector<int>>();
      if (mult.size() != kNumClasses) {
        throw ConfigError("augment.multipliers must list exactly 3 values");
      }
      cfg.augment.per_class_multipliers.clear();
      for (int c = 0; c < kNumClasses; ++c) {
        cfg.augment.per_class_multipliers[label_from_index(c)] = mult[c];
      }
    }
  }
  if (j.contains("embeddings")) {
    const auto& e = j.at("embeddings");
    maybe(e, "path", cfg.embeddings.path);
    maybe(e, "min_frequency", cfg.embeddings.min_frequency);
    if (e.contains("dimension")) {
      cfg.model.embedding_dimension = e.at("dimension").get<int>();
    }
    if (e.contains("trainable")) {
      cfg.model.embeddings_trainable = e.at("trainable").get<bool>();
    }
  }
  if (j.contains("model")) {
    const auto& m = j.at("model");
    if (m.contains("cell_kind")) {
      cfg.model.cell_kind =
          cell_kind_from_name(m.at("cell_kind").get<std::string>());
    }
    maybe(m, "hidden_units", cfg.model.hidden_units);
    maybe(m, "embedding_dimension", cfg.model.embedding_dimension);
    maybe(m, "max_length", cfg.model.max_length);
    maybe(m, "dense_layers", cfg.model.dense_layers);
    maybe(m, "recurrent_dropout", cfg.model.recurrent_dropout);
    maybe(m, "embeddings_trainable", cfg.model.embeddings_trainable);
    maybe(m, "seed", cfg.model.seed);
  }
  maybe(j, "precision", cfg.precision);
  if (j.contains("train")) {
    const auto& t = j.at("train");
    maybe(t, "learning_rate", cfg.schedule.initial_learning_rate);
    maybe(t, "epochs", cfg.schedule.epochs);
    maybe(t, "batch_size", cfg.schedule.batch_size);
    maybe(t, "lr_decay", cfg.schedule.lr_decay);
    maybe(t, "plateau_patience", cfg.schedule.plateau_patience);
    maybe(t, "plateau_factor", cfg.schedule.plateau_factor);
    maybe(t, "early_stop_patience", cfg.schedule.early_stop_patience);
    maybe(t, "min_delta", cfg.schedule.min_delta);
    maybe(t, "val_fraction", cfg.val_fraction);
    maybe(t, "seed", cfg.schedule.seed);
    if (t.contains("optimizer")) {
      cfg.schedule.optimizer =
          optimizer_kind_from_name(t.at("optimizer").get<std::string>());
    }
  }
  if (j.contains("synthetic")) {
    const auto& s = j.at("synthetic");
    if (s.contains("per_class")) {
      auto pc = s.at("per_class").get<std::vector<int>>();
      if (pc.size() != kNumClasses) {
        throw ConfigError("synthetic.per_class must list exactly 3 sizes");
      }
      for (int c = 0; c < kNumClasses; ++c) cfg.synthetic.per_class[c] = pc[c];
    }
    maybe(s, "class_pool_size", cfg.synthetic.class_pool_size);
    maybe(s, "shared_pool_size", cfg.synthetic.shared_pool_size);
    maybe(s, "overlap", cfg.synthetic.overlap);
    maybe(s, "min_length", cfg.synthetic.min_length);
    maybe(s, "max_length", cfg.synthetic.max_length);
    maybe(s, "seed", cfg.synthetic.seed);
  }
  if (j.contains("seed")) {
    cfg.set_master_seed(j.at("seed").get<std::uint64_t>());
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad config JSON in " + path + ": " + e.what());
  }
  return from_json(j);
}

void RunConfig::set_master_seed(std::uint64_t seed) {
  split.seed = derive_seed(seed, "split");
  augment.seed = derive_seed(seed, "augment");
  model.seed = derive_seed(seed, "model");
  schedule.seed = derive_seed(seed, "train");
  synthetic.seed = derive_seed(seed, "synthetic");
}

}  // namespace codemix

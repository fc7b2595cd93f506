#include "codemix/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace codemix {

EmbeddingTable load_embeddings(const std::string& path, int expected_dimension,
                               std::vector<std::string>* warnings) {
  if (expected_dimension <= 0) {
    throw ConfigError("expected embedding dimension must be positive");
  }
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embeddings file: " + path);

  EmbeddingTable table;
  table.dimension = expected_dimension;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string token;
    fields >> token;
    std::vector<double> components;
    components.reserve(expected_dimension);
    std::string comp;
    while (fields >> comp) {
      double value = 0.0;
      auto [ptr, ec] =
          std::from_chars(comp.data(), comp.data() + comp.size(), value);
      if (ec != std::errc() || ptr != comp.data() + comp.size()) {
        throw DataError("embeddings line " + std::to_string(line_no) +
                        ": non-numeric component '" + comp + "'");
      }
      components.push_back(value);
    }
    if (static_cast<int>(components.size()) != expected_dimension) {
      throw DataError("embeddings line " + std::to_string(line_no) +
                      ": expected " + std::to_string(expected_dimension) +
                      " components, found " +
                      std::to_string(components.size()));
    }
    if (table.vectors.count(token) && warnings) {
      warnings->push_back("duplicate embedding for '" + token + "' at line " +
                          std::to_string(line_no) + "; keeping the last");
    }
    table.vectors[token] = std::move(components);
  }
  return table;
}

Vocabulary::Vocabulary() {
  add(kPadToken);
  add(kUnkToken);
}

void Vocabulary::add(std::string token) {
  auto [it, inserted] =
      token_to_index_.emplace(token, static_cast<int>(index_to_token_.size()));
  if (!inserted) throw DataError("duplicate vocabulary token '" + token + "'");
  index_to_token_.push_back(std::move(token));
}

const std::string& Vocabulary::token_at(int index) const {
  if (index < 0 || index >= size()) {
    throw DataError("vocabulary index out of range: " + std::to_string(index));
  }
  return index_to_token_[index];
}

std::string Vocabulary::hash() const {
  std::uint64_t h = fnv1a64("vocab-v1");
  for (int i = 0; i < size(); ++i) {
    h = fnv1a64(index_to_token_[i], h);
    h = fnv1a64("\t" + std::to_string(i) + "\n", h);
  }
  return hex64(h);
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write vocabulary file: " + path);
  for (int i = 0; i < size(); ++i) {
    out << index_to_token_[i] << '\t' << i << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vocabulary file: " + path);
  Vocabulary vocab;
  std::string line;
  std::size_t line_no = 0;
  int expected = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError("vocabulary line " + std::to_string(line_no) +
                      ": expected token<TAB>index");
    }
    std::string token = line.substr(0, tab);
    int index = std::stoi(line.substr(tab + 1));
    if (index != expected++) {
      throw DataError("vocabulary line " + std::to_string(line_no) +
                      ": indices must be dense and ordered");
    }
    if (index == kPadIndex || index == kUnkIndex) {
      const char* expected = index == kPadIndex ? kPadToken : kUnkToken;
      if (token != expected) {
        throw DataError("vocabulary line " + std::to_string(line_no) +
                        ": reserved index holds '" + token + "'");
      }
      continue;  // already present from the constructor
    }
    vocab.add(std::move(token));
  }
  return vocab;
}

Vocabulary build_vocab(const std::vector<std::vector<std::string>>& documents,
                       int min_frequency) {
  std::unordered_map<std::string, std::size_t> freq;
  for (const auto& doc : documents) {
    for (const auto& tok : doc) {
      if (tok == Vocabulary::kPadToken || tok == Vocabulary::kUnkToken) {
        throw DataError("corpus contains reserved token '" + tok + "'");
      }
      freq[tok] += 1;
    }
  }
  std::vector<std::pair<std::string, std::size_t>> items(freq.begin(),
                                                         freq.end());
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary vocab;
  for (auto& [token, count] : items) {
    if (count >= static_cast<std::size_t>(std::max(1, min_frequency))) {
      vocab.add(std::move(token));
    }
  }
  return vocab;
}

EncodedSequence encode_sequence(const std::vector<std::string>& tokens,
                                const Vocabulary& vocab, int max_length) {
  if (max_length < 1) throw ConfigError("max_length must be >= 1");
  EncodedSequence seq;
  seq.true_length =
      static_cast<int>(std::min<std::size_t>(tokens.size(), max_length));
  seq.indices.assign(max_length, Vocabulary::kPadIndex);
  for (int i = 0; i < seq.true_length; ++i) {
    seq.indices[i] = vocab.index_of(tokens[i]);
  }
  return seq;
}

std::vector<std::string> decode_sequence(const EncodedSequence& seq,
                                         const Vocabulary& vocab) {
  std::vector<std::string> tokens;
  tokens.reserve(seq.true_length);
  for (int i = 0; i < seq.true_length; ++i) {
    tokens.push_back(vocab.token_at(seq.indices[i]));
  }
  return tokens;
}

}  // namespace codemix

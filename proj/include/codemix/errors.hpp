#pragma once

#include <stdexcept>
#include <string>

namespace codemix {

// Error taxonomy mirrors the CLI exit codes: usage/config -> 1, data -> 2,
// numeric failure -> 3.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace codemix

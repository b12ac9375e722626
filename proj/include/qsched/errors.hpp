#pragma once

#include <stdexcept>
#include <string>

namespace qsched {

// Bad configuration values: fleet sizes, hyperparameters, generator ranges,
// config-file schema violations.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structurally unreadable input (missing header, wrong column layout).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Readable input whose values break a domain invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qsched

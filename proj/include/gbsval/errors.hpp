#pragma once

#include <stdexcept>

namespace gbsval {

// Invalid parameters or configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Malformed, truncated or mismatched input data (CLI exit code 3).
class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Numerically invalid state: non-physical matrices, undefined statistics (CLI exit code 4).
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace gbsval

#pragma once

#include <stdexcept>
#include <string>

namespace ugs {

// Input files or corpora that violate a data invariant.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or contradictory pipeline configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Venue backend failures: transport, fixture miss, malformed response.
class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ugs

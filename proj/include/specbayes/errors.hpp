#pragma once

#include <stdexcept>
#include <string>

namespace specbayes {

// Argument-level failures use std::invalid_argument / std::domain_error.
// The types below cover failures that are about the input *content* or the
// configuration rather than a malformed call.

class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InferenceFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace specbayes

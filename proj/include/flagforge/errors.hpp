#pragma once

#include <stdexcept>
#include <string>

namespace flagforge {

// Malformed or out-of-contract input. The CLI maps it to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
 public:
  using InputError::InputError;
};

// Objects whose sizes disagree (certificate vs program, solver output vs
// block map).
class DimensionError : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace flagforge

#pragma once

#include <stdexcept>
#include <string>

namespace nullwit {

/// Input violates a documented contract (shape, normalization, positivity).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be read, written or parsed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Named construction (frame, optimum case, source) does not exist.
class UnknownCaseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nullwit

#pragma once

#include <stdexcept>
#include <string>

namespace subword {

// Malformed input files, missing resources, I/O failures.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values detected during training or evaluation.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace subword

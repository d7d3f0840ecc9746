#pragma once

#include <stdexcept>
#include <string>

namespace snapgan {

// Malformed or inconsistent input data (files, corpora, labels).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// NaN/Inf encountered during scoring or training.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace snapgan

#pragma once

#include <stdexcept>
#include <string>

namespace sparsekm {

// Raised when an iterative routine fails numerically (NaN iterates,
// eigensolver breakdown, degenerate certificate denominators, ...).
// Precondition and configuration violations use std::invalid_argument.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed CSV input; carries the 1-based offending line.
class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& what, long line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

}  // namespace sparsekm

#pragma once

#include <stdexcept>
#include <string>

namespace wrgm {

/// Raised when a numerical routine fails on in-contract input
/// (eigen-solver non-convergence, indefinite matrix, exhausted rejection
/// budget, empty Monte Carlo average). Argument/contract violations use
/// std::invalid_argument instead.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace wrgm

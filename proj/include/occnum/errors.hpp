#pragma once

#include <stdexcept>
#include <string>

namespace occnum {

// Model file syntax/semantic error with 1-based source location.
struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(int line_, int col_, const std::string& what_)
      : std::runtime_error("line " + std::to_string(line_) + ", col " +
                           std::to_string(col_) + ": " + what_),
        line(line_), col(col_) {}
};

// Numerical failure: singular solve, non-convergent series, blow-up.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace occnum

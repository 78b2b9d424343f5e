#pragma once

#include <stdexcept>
#include <string>

namespace abocs {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : Error {
  using Error::Error;
};

/* Input text could not be parsed; line is 1-based, 0 when unknown. */
struct ParseError : Error {
  int line;
  ParseError(const std::string& msg, int line_ = 0)
      : Error(line_ > 0 ? "line " + std::to_string(line_) + ": " + msg : msg),
        line(line_) {}
};

struct GridError : Error {
  using Error::Error;
};

struct UnsupportedAcceptanceError : Error {
  using Error::Error;
};

struct AlphabetMismatchError : Error {
  using Error::Error;
};

}  // namespace abocs

#pragma once

#include <stdexcept>
#include <string>

namespace cantor {

enum class ErrorCode {
  InvalidSequence,   // a rule that produces some q_n < 2
  IndexOutOfRange,   // n outside the defined prefix
  DigitOutOfRange,   // E_n not in {0, ..., q_n - 1}
  InvalidArgument,
  ParseError,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cantor

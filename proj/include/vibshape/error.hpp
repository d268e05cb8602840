#pragma once

#include <stdexcept>
#include <string>

namespace vibshape {

enum class ErrorCode {
  ParameterDomain,
  Input,
  InsufficientData,
  NoModesFound,
  Estimation,
  Grid,
  OutOfDomain,
  Configuration,
  UndefinedReduction,
  Parse,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

/// Single exception type for the library; the code selects the C status and
/// the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace vibshape

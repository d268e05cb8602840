#include "vibshape/error.hpp"

namespace vibshape {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ParameterDomain: return "parameter domain error";
    case ErrorCode::Input: return "input error";
    case ErrorCode::InsufficientData: return "insufficient data";
    case ErrorCode::NoModesFound: return "no modes found";
    case ErrorCode::Estimation: return "estimation error";
    case ErrorCode::Grid: return "grid error";
    case ErrorCode::OutOfDomain: return "out of domain";
    case ErrorCode::Configuration: return "configuration error";
    case ErrorCode::UndefinedReduction: return "undefined reduction";
    case ErrorCode::Parse: return "parse error";
    case ErrorCode::Io: return "I/O error";
  }
  return "unknown error";
}

}  // namespace vibshape

#include "claws/error.hpp"

namespace claws {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicatePath: return "DuplicatePath";
    case ErrorCode::MissingTrace: return "MissingTrace";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::EmptyResponse: return "EmptyResponse";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::WindowTooLarge: return "WindowTooLarge";
    case ErrorCode::DegenerateAttention: return "DegenerateAttention";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::SingleClassInput: return "SingleClassInput";
    case ErrorCode::NonFiniteScore: return "NonFiniteScore";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::NoValidClass: return "NoValidClass";
    case ErrorCode::DegenerateAgreementBase: return "DegenerateAgreementBase";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

}  // namespace claws

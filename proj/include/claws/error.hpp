#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace claws {

enum class ErrorCode {
  // trace / manifest
  InvariantViolation,
  BadMagic,
  UnsupportedVersion,
  Truncated,
  ParseError,
  DuplicatePath,
  MissingTrace,
  IoError,
  // scores
  EmptyResponse,
  KTooLarge,
  WindowTooLarge,
  DegenerateAttention,
  InvalidConfig,
  // classify
  SingleClassInput,
  NonFiniteScore,
  EmptyClass,
  DimensionMismatch,
  // metrics
  LengthMismatch,
  Empty,
  NoValidClass,
  DegenerateAgreementBase,
  // synth
  InvalidSpec,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one ErrorCode.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace claws

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace upm {

enum class ErrorCode {
  MalformedHeader,
  UnsupportedElementType,
  TruncatedPayload,
  IoFailure,
  ZeroExtent,
  ZeroVector,
  ShapeMismatch,
  AllZeroStack,
  ItemOutOfRange,
  InvalidBeta,
  UniverseTooLarge,
  EmptyMap,
  TooFewPoints,
  EmptyMask,
  NotSymmetric,
  NoConvergence,
  TooFewRows,
  DegenerateAffinity,
  LengthMismatch,
  SingleClass,
  EmptyTraining,
  ConfigError,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (and the Python bindings) can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failure inside a tensor file; remembers where the reader gave up.
class NpyError : public Error {
 public:
  NpyError(ErrorCode code, std::size_t offset, const std::string& what)
      : Error(code, what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace upm

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spcdrift {

enum class ErrorCode {
  DimensionMismatch,
  NonFiniteValue,
  DuplicateId,
  MalformedRow,
  EmptyTrainingSet,
  InsufficientSamples,
  SingularCovariance,
  MissingCovariance,
  ZeroVector,
  EmptyImage,
  ImageTooSmall,
  NotNormalized,
  NonFiniteInput,
  ZeroSigma,
  EmptyPool,
  InvalidConfig,
  UnknownId,
  UndefinedRate,
  AllResamplesUndefined,
  Io,
};

std::string_view to_string(ErrorCode code);

// All data errors raised by the library carry a code so callers (and the CLI
// exit-code mapping) can distinguish them without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace spcdrift

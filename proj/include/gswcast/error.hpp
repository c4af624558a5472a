#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gswcast {

enum class ErrorCode {
  // table-core
  MissingColumn,
  NonPositiveMeasure,
  MalformedRow,
  TypeMismatch,
  UnknownMeasure,
  UnknownDimension,
  UnknownTimestamp,
  // samplers
  NonPositiveDelta,
  NonPositiveWeight,
  DeltaDecrease,
  DuplicateRowId,
  NonPositiveTau,
  InvalidProbability,
  UnsortedDeltas,
  // estimation / grouping
  LengthMismatch,
  InvalidTheta,
  EmptyGroup,
  ZeroTrueSum,
  InvalidGroupCount,
  // forecast
  SeriesTooShort,
  NonStationary,
  NonStationaryAlpha,
  InvalidHorizon,
  InvalidConfidence,
  // engine
  SyntaxError,
  EmptyWindow,
  NoCoveringSample,
  InvalidArgument,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// All library failures surface as this exception; `code()` says which
/// contract was violated and `what()` carries the detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failures additionally carry the byte offset into the input.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, const std::string& expected)
      : Error(ErrorCode::SyntaxError,
              "at position " + std::to_string(position) + ": expected " + expected),
        position_(position),
        expected_(expected) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t position_;
  std::string expected_;
};

/// Process exit code for the CLI: 2 parse error, 3 data error, 4 no covering sample.
int exit_code_for(ErrorCode code);

}  // namespace gswcast

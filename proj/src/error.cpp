#include "gswcast/error.hpp"

namespace gswcast {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::NonPositiveMeasure: return "NonPositiveMeasure";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::UnknownMeasure: return "UnknownMeasure";
    case ErrorCode::UnknownDimension: return "UnknownDimension";
    case ErrorCode::UnknownTimestamp: return "UnknownTimestamp";
    case ErrorCode::NonPositiveDelta: return "NonPositiveDelta";
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::DeltaDecrease: return "DeltaDecrease";
    case ErrorCode::DuplicateRowId: return "DuplicateRowId";
    case ErrorCode::NonPositiveTau: return "NonPositiveTau";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::UnsortedDeltas: return "UnsortedDeltas";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidTheta: return "InvalidTheta";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::ZeroTrueSum: return "ZeroTrueSum";
    case ErrorCode::InvalidGroupCount: return "InvalidGroupCount";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::NonStationary: return "NonStationary";
    case ErrorCode::NonStationaryAlpha: return "NonStationaryAlpha";
    case ErrorCode::InvalidHorizon: return "InvalidHorizon";
    case ErrorCode::InvalidConfidence: return "InvalidConfidence";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::NoCoveringSample: return "NoCoveringSample";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError:
      return 2;
    case ErrorCode::NoCoveringSample:
      return 4;
    default:
      return 3;
  }
}

}  // namespace gswcast

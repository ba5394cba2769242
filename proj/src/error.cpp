#include "tokeval/error.hpp"

namespace tokeval {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBadMagic: return "bad-magic";
    case ErrorCode::kUnsupportedVersion: return "unsupported-version";
    case ErrorCode::kTokenOutOfRange: return "token-out-of-range";
    case ErrorCode::kTruncated: return "truncated";
    case ErrorCode::kMalformedHeader: return "malformed-header";
    case ErrorCode::kMalformedLine: return "malformed-line";
    case ErrorCode::kLengthMismatch: return "length-mismatch";
    case ErrorCode::kNonFinite: return "non-finite";
    case ErrorCode::kInvalidDataset: return "invalid-dataset";
    case ErrorCode::kIncompatible: return "incompatible";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kOutOfRange: return "out-of-range";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kNumeric: return "numeric";
    case ErrorCode::kCodec: return "codec";
  }
  return "unknown";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOutOfRange:
    case ErrorCode::kInvalidArgument:
      return 2;
    case ErrorCode::kNumeric:
      return 4;
    default:
      return 3;
  }
}

}  // namespace tokeval

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tokeval {

enum class ErrorCode {
  // input format / data errors
  kBadMagic,
  kUnsupportedVersion,
  kTokenOutOfRange,
  kTruncated,
  kMalformedHeader,
  kMalformedLine,
  kLengthMismatch,
  kNonFinite,
  kInvalidDataset,
  kIncompatible,
  kIo,
  // caller errors
  kOutOfRange,
  kInvalidArgument,
  // numeric failures
  kNumeric,
  kCodec,
};

std::string_view to_string(ErrorCode code);

/// Process exit status for a failure class: 2 usage, 3 input format, 4 numeric.
int exit_code_for(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace tokeval

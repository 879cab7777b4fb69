#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vcd {

enum class ErrorCode {
  kParseError,
  kTruncatedStream,
  kUnsupportedFormat,
  kInconsistentFrames,
  kIoError,
  kDimensionMismatch,
  kShapeMismatch,
  kTooShort,
  kLagNotStored,
  kRangeError,
  kFormatError,
  kCorruptFile,
  kIncompatibleDescriptors,
  kInvalidSpec,
  kInvalidArgument,
  kEmptyIndex,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// callers (and tests) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace vcd

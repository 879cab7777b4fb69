#include "vcd/error.hpp"

namespace vcd {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kTruncatedStream: return "TruncatedStream";
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kInconsistentFrames: return "InconsistentFrames";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kLagNotStored: return "LagNotStored";
    case ErrorCode::kRangeError: return "RangeError";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kCorruptFile: return "CorruptFile";
    case ErrorCode::kIncompatibleDescriptors: return "IncompatibleDescriptors";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kEmptyIndex: return "EmptyIndex";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace vcd

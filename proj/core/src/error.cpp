#include "confocal/error.hpp"

namespace confocal {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidStack: return "InvalidStack";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyPopulation: return "EmptyPopulation";
    case ErrorCode::InvalidSigma: return "InvalidSigma";
    case ErrorCode::KernelTooLarge: return "KernelTooLarge";
    case ErrorCode::BinMismatch: return "BinMismatch";
    case ErrorCode::DegenerateNoise: return "DegenerateNoise";
    case ErrorCode::NegativeSkewUnsupported: return "NegativeSkewUnsupported";
    case ErrorCode::DegenerateHistogram: return "DegenerateHistogram";
    case ErrorCode::SegmentationFailed: return "SegmentationFailed";
    case ErrorCode::ScaleUndefined: return "ScaleUndefined";
    case ErrorCode::InvalidTarget: return "InvalidTarget";
    case ErrorCode::NoSignal: return "NoSignal";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::CorruptStack: return "CorruptStack";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::StatsFormat: return "StatsFormat";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

}  // namespace confocal

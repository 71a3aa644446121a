#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace confocal {

/// Every failure mode the library reports. The enumerator name is what the
/// CLI prints, so keep these stable.
enum class ErrorCode {
  InvalidStack,
  InvalidArgument,
  EmptyPopulation,
  InvalidSigma,
  KernelTooLarge,
  BinMismatch,
  DegenerateNoise,
  NegativeSkewUnsupported,
  DegenerateHistogram,
  SegmentationFailed,
  ScaleUndefined,
  InvalidTarget,
  NoSignal,
  OutOfBounds,
  UnsupportedFormat,
  CorruptStack,
  IoError,
  StatsFormat,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace confocal

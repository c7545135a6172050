#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rgbm {

enum class ErrorCode {
  NonPositiveSpot,
  NegativeBarrier,
  BarrierAboveSpot,
  BarrierAboveStrike,
  NonPositiveVol,
  NonPositiveTerm,
  RateYieldDegeneracy,
  BStarOutOfRange,
  NoRootInBracket,
  StartBelowBarrier,
  MeasureMismatch,
  SlopeUndefined,
  InvalidLadder,
  GridMismatch,
  DegenerateDenominator,
  InvalidConfig,
};

/// Stable identifier used in CLI messages and JSON output.
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return to_string(code_); }

 private:
  ErrorCode code_;
};

}  // namespace rgbm

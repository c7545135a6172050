#include "rgbm/error.hpp"

namespace rgbm {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonPositiveSpot: return "NonPositiveSpot";
    case ErrorCode::NegativeBarrier: return "NegativeBarrier";
    case ErrorCode::BarrierAboveSpot: return "BarrierAboveSpot";
    case ErrorCode::BarrierAboveStrike: return "BarrierAboveStrike";
    case ErrorCode::NonPositiveVol: return "NonPositiveVol";
    case ErrorCode::NonPositiveTerm: return "NonPositiveTerm";
    case ErrorCode::RateYieldDegeneracy: return "RateYieldDegeneracy";
    case ErrorCode::BStarOutOfRange: return "BStarOutOfRange";
    case ErrorCode::NoRootInBracket: return "NoRootInBracket";
    case ErrorCode::StartBelowBarrier: return "StartBelowBarrier";
    case ErrorCode::MeasureMismatch: return "MeasureMismatch";
    case ErrorCode::SlopeUndefined: return "SlopeUndefined";
    case ErrorCode::InvalidLadder: return "InvalidLadder";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

}  // namespace rgbm

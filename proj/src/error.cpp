#include "edl/error.hpp"

namespace edl {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::AllSameSignValences: return "AllSameSignValences";
    case ErrorCode::NeutralityViolated: return "NeutralityViolated";
    case ErrorCode::MismatchedReference: return "MismatchedReference";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::NonDecreasingDetected: return "NonDecreasingDetected";
    case ErrorCode::UnsupportedProvenance: return "UnsupportedProvenance";
    case ErrorCode::RootBracketFailure: return "RootBracketFailure";
    case ErrorCode::NonMonotoneTrajectory: return "NonMonotoneTrajectory";
    case ErrorCode::DenominatorNearZero: return "DenominatorNearZero";
    case ErrorCode::NegativeTime: return "NegativeTime";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::AllBoundaryPotentialsEqual: return "AllBoundaryPotentialsEqual";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::BadRadii: return "BadRadii";
    case ErrorCode::InconsistentParams: return "InconsistentParams";
    case ErrorCode::ModelProfileMismatch: return "ModelProfileMismatch";
    case ErrorCode::NewtonDivergence: return "NewtonDivergence";
    case ErrorCode::RegionEmpty: return "RegionEmpty";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace edl

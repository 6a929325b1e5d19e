#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace edl {

enum class ErrorCode {
  InvalidArgument,
  AllSameSignValences,
  NeutralityViolated,
  MismatchedReference,
  NoSignChange,
  NonDecreasingDetected,
  UnsupportedProvenance,
  RootBracketFailure,
  NonMonotoneTrajectory,
  DenominatorNearZero,
  NegativeTime,
  GridTooCoarse,
  AllBoundaryPotentialsEqual,
  BracketFailure,
  DegenerateDenominator,
  BadRadii,
  InconsistentParams,
  ModelProfileMismatch,
  NewtonDivergence,
  RegionEmpty,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace edl

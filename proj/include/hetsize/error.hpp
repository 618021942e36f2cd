#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hetsize {

enum class ErrorCode {
  DimensionMismatch,
  RankDeficient,
  ZeroRestriction,
  TooFewObservations,
  NonFiniteInput,
  NonpositiveWeight,
  BadPartition,
  BadSimplexPoint,
  BadConfig,
  PreconditionUnverified,
  DecompositionFailure,
  EquivalenceBreach,
  InvarianceBreach,
  AssumptionViolated,
  NotControllable,
  BracketFailure,
  ParseError,
  RaggedRows,
  UnknownFixture,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hetsize

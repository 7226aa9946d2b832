#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sdof {

enum class ErrorCode {
  // core-model
  SumNotOne,
  NegativeFraction,
  SymmetryViolated,
  MixedArity,
  RankDeficiencyPersistent,
  NonIntegralBlock,
  BadArgument,
  // precoding
  OverConstrained,
  IncompleteTrace,
  UnknownSymbolId,
  // schemes
  UnknownScheme,
  BadParams,
  CsitViolation,
  RealizationTooShort,
  NonPositiveSubDof,
  // analysis
  EmptySystem,
  GridTooSmall,
  DimensionTooLarge,
  // regions
  UnknownTheorem,
  ArityMismatch,
  Unbounded,
  UnknownVariable,
  BadWeights,
  InnerNotContained,
  // cli
  ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Every library failure carries a machine-readable code next to the message.
class LabError : public std::runtime_error {
 public:
  LabError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sdof

#include "sdof/error.hpp"

namespace sdof {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SumNotOne: return "SumNotOne";
    case ErrorCode::NegativeFraction: return "NegativeFraction";
    case ErrorCode::SymmetryViolated: return "SymmetryViolated";
    case ErrorCode::MixedArity: return "MixedArity";
    case ErrorCode::RankDeficiencyPersistent: return "RankDeficiencyPersistent";
    case ErrorCode::NonIntegralBlock: return "NonIntegralBlock";
    case ErrorCode::BadArgument: return "BadArgument";
    case ErrorCode::OverConstrained: return "OverConstrained";
    case ErrorCode::IncompleteTrace: return "IncompleteTrace";
    case ErrorCode::UnknownSymbolId: return "UnknownSymbolId";
    case ErrorCode::UnknownScheme: return "UnknownScheme";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::CsitViolation: return "CsitViolation";
    case ErrorCode::RealizationTooShort: return "RealizationTooShort";
    case ErrorCode::NonPositiveSubDof: return "NonPositiveSubDof";
    case ErrorCode::EmptySystem: return "EmptySystem";
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::UnknownTheorem: return "UnknownTheorem";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::BadWeights: return "BadWeights";
    case ErrorCode::InnerNotContained: return "InnerNotContained";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace sdof

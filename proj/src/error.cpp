#include "digtree/error.hpp"

namespace digtree {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::InvalidProbs: return "InvalidProbs";
    case ErrorCode::PrefixViolation: return "PrefixViolation";
    case ErrorCode::EmptyAlphabetSymbol: return "EmptyAlphabetSymbol";
    case ErrorCode::DepthGuardExceeded: return "DepthGuardExceeded";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::PoleAtNonpositiveInteger: return "PoleAtNonpositiveInteger";
    case ErrorCode::SeriesNotConverged: return "SeriesNotConverged";
    case ErrorCode::RationalityRequired: return "RationalityRequired";
    case ErrorCode::ImaginaryResidue: return "ImaginaryResidue";
    case ErrorCode::UnsupportedModel: return "UnsupportedModel";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "Unknown";
}

int exit_status(ErrorCode code) noexcept {
  if (code == ErrorCode::UsageError) return 2;
  return 10 + static_cast<int>(code);
}

}  // namespace digtree

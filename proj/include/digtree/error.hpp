#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace digtree {

/// Every failure the library reports. The CLI maps each code to its own
/// process exit status (see `exit_status`).
enum class ErrorCode {
  InvalidModel,
  InvalidProbs,
  PrefixViolation,
  EmptyAlphabetSymbol,
  DepthGuardExceeded,
  CapExceeded,
  NumericalBreakdown,
  NotPositiveDefinite,
  PoleAtNonpositiveInteger,
  SeriesNotConverged,
  RationalityRequired,
  ImaginaryResidue,
  UnsupportedModel,
  TooFewSamples,
  UsageError,
};

std::string_view error_code_name(ErrorCode code) noexcept;

/// Exit status used by the command-line front end; 0 is reserved for success.
int exit_status(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace digtree

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace trustdyn {

enum class ErrorKind {
  ZeroRow,
  DimensionMismatch,
  Diverged,
  NoConsensus,
  BadLambda,
  NoSuccess,
  NonPositiveVariance,
  SpectralConditionFailed,
  DegenerateDenominator,
  SingularSystem,
  InvalidArgument,
  ConfigInvalid,
  IoError,
  UnknownTarget,
};

std::string_view to_string(ErrorKind kind);

// Every failure surfaced by the library carries one of the kinds above so
// callers (and the CLI) can branch on it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace trustdyn

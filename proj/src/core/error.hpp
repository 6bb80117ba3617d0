#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pencilkit {

// One exception type for the whole library; the code tells callers (and the
// C API) which contract was violated.
enum class ErrorCode {
  SyntaxError,
  UnknownIdentifier,
  EvalDomain,
  DimensionCap,
  SingularMetric,
  SingularPencil,
  PreconditionFailed,
  NoUnity,
  NotAutomorphism,
  NotInvertibleEulerMultiplication,
  AsymmetryDetected,
  RankDeficient,
  SingularInducedMetric,
  NotDistinguished,
  ClosureFailed,
  ConfigError,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}
  Error(ErrorCode code, std::string message, std::vector<double> witness)
      : std::runtime_error(std::move(message)),
        code_(code),
        witness_(std::move(witness)) {}

  ErrorCode code() const { return code_; }

  // Point at which the violation was observed, when one exists.
  const std::vector<double>& witness() const { return witness_; }

 private:
  ErrorCode code_;
  std::vector<double> witness_;
};

const char* error_code_name(ErrorCode code);

}  // namespace pencilkit

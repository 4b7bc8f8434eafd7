#pragma once

#include <stdexcept>
#include <string>

namespace h2wkit {

// Failure categories shared by every module. The numeric values of the first
// group double as CLI exit codes.
enum class ErrorCode {
  kParse = 2,                // malformed model document or I/O failure
  kBandViolation = 3,        // frequency bound reaches a purely imaginary pole
  kDegenerateSpectrum = 4,   // repeated or near-defective eigenvalues
  kBackendDisagreement = 5,  // backends differ beyond tolerance
  kSolverFailure = 6,        // singular Lyapunov operator, residual check, ...
  kInvalidArgument = 10,     // bad dimensions, negative tolerance, ...
  kDomain = 11,              // complex function evaluated on an excluded point
  kNotStrictlyProper = 12,   // D != 0 where the norm needs D = 0
  kUnstable = 13,            // backend requires an asymptotically stable model
  kSingularShift = 14,       // sI - A numerically singular
  kNonConvergence = 15,      // quadrature error estimate stalled above tol
  kDimensionMismatch = 16,   // model document blocks disagree with dims
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace h2wkit

#include "h2wkit/error.hpp"

#include "h2wkit/norm_result.hpp"

namespace h2wkit {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kBandViolation: return "band violation";
    case ErrorCode::kDegenerateSpectrum: return "degenerate spectrum";
    case ErrorCode::kBackendDisagreement: return "backend disagreement";
    case ErrorCode::kSolverFailure: return "solver failure";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kDomain: return "domain error";
    case ErrorCode::kNotStrictlyProper: return "not strictly proper";
    case ErrorCode::kUnstable: return "unstable model";
    case ErrorCode::kSingularShift: return "singular shift";
    case ErrorCode::kNonConvergence: return "quadrature non-convergence";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
  }
  return "unknown error";
}

const char* to_string(Backend backend) {
  switch (backend) {
    case Backend::kSpectral: return "spectral";
    case Backend::kGramian: return "gramian";
    case Backend::kQuadrature: return "quadrature";
  }
  return "?";
}

}  // namespace h2wkit

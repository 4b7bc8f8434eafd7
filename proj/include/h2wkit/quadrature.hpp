#pragma once

#include <cstddef>

#include "h2wkit/model.hpp"
#include "h2wkit/norm_result.hpp"

namespace h2wkit {

/// ||H(j nu)||_F^2. Throws kSingularShift when j nu hits a pole.
double integrand(const StateSpaceModel& model, double nu);

struct QuadratureReport {
  double value = 0.0;           // (1/2pi) * integral over +-[lo, hi]
  double error_estimate = 0.0;  // same scaling as value
  std::size_t evaluations = 0;
  std::size_t panels = 0;       // after pre-splitting at resonances
  std::size_t antistable_poles = 0;
};

struct QuadratureOptions {
  double tol = 1e-9;
  unsigned max_depth = 18;
  // Lightly damped poles (|Re l| / |l| below this) inside the band put a
  // panel boundary at |Im l|.
  double resonance_ratio = 0.1;
};

/// Adaptive Gauss-Kronrod (7/15) integration of the band integrand over
/// [lo, hi], doubled for the mirrored negative band. Throws kBandViolation
/// when a purely imaginary pole lies on j[-hi, hi] and kNonConvergence when
/// the error estimate stays above tol * max(1, value).
QuadratureReport integrate_band(const StateSpaceModel& model,
                                const FrequencyBand& band,
                                const QuadratureOptions& options = {});

NormResult h2w_quadrature(const StateSpaceModel& model, const FrequencyBand& band,
                          const QuadratureOptions& options = {});

}  // namespace h2wkit

#pragma once

#include <optional>

#include <Eigen/Dense>

#include "h2wkit/model.hpp"
#include "h2wkit/norm_result.hpp"

namespace h2wkit {

struct SpectralOptions {
  // Pole pairs with |l_i + l_k| <= degeneracy_tol * max(1, rho) use the
  // second-order (double pole on the axis) term.
  double degeneracy_tol = 1e-10;
  // The complex sum must be real to within realness_tol * max(1, value_sq).
  double realness_tol = 1e-10;
  // Imaginary-axis classification tolerance; default_imag_tol() when unset.
  std::optional<double> imag_tol;
};

/// Residue form of the infinite-horizon H2 norm: tr sum phi_i H(-l_i)^T.
/// Requires D = 0 and a strictly stable spectrum.
NormResult h2_spectral(const SpectralData& spectrum, const StateSpaceModel& model,
                       const SpectralOptions& options = {});

/// Frequency-limited H2 norm over [0, omega] from poles and residues only.
///
/// Sums the pole-pair terms a_ik (arctangent form, or the double-pole form
/// when l_i + l_k = 0), the feedthrough term (omega/pi) tr(D D^T) and the
/// cross term -(2/pi) sum tr(phi_i D^T) atan(omega/l_i). Valid for any simple
/// spectrum provided omega stays below every purely imaginary pole; throws
/// kBandViolation otherwise.
NormResult h2w_spectral(const SpectralData& spectrum, const Eigen::MatrixXd& D,
                        double omega, const SpectralOptions& options = {});

/// Stable, strictly proper shortcut:
///   tr sum phi_i H(-l_i)^T * (-(2/pi) atan(omega/l_i)),
/// with H(-l_i) evaluated from the state-space matrices rather than from the
/// residues, so it shares no arithmetic with h2w_spectral beyond the
/// decomposition.
NormResult h2w_spectral_corollary(const SpectralData& spectrum,
                                  const StateSpaceModel& model, double omega,
                                  const SpectralOptions& options = {});

/// ||.||^2 over [lo, hi] = h2w(hi) - h2w(lo).
NormResult h2w_band(const SpectralData& spectrum, const Eigen::MatrixXd& D,
                    const FrequencyBand& band, const SpectralOptions& options = {});

/// Per-mode weights -(2/pi) atan(omega/l_i) of the stable shortcut.
Eigen::VectorXcd modal_weights(const SpectralData& spectrum, double omega);

enum class LimitRegime {
  kStable,     // converges to the H2 norm
  kUnstable,   // finite, signed stable/antistable sum
  kImaginary,  // diverges
};

const char* to_string(LimitRegime regime);

struct LimitResult {
  LimitRegime regime = LimitRegime::kStable;
  double value_sq = 0.0;  // +inf for kImaginary
  double imag_residual = 0.0;
};

/// omega -> infinity behaviour of a strictly proper model (D is assumed 0).
LimitResult h2w_limit(const SpectralData& spectrum,
                      const PoleClassification& classification,
                      const SpectralOptions& options = {});

}  // namespace h2wkit

#pragma once

#include <Eigen/Dense>

#include "h2wkit/model.hpp"
#include "h2wkit/norm_result.hpp"

namespace h2wkit {

/// Solves A P + P A^T + rhs = 0 (Bartels-Stewart on the real Schur form
/// of A). Throws kSolverFailure when some l_i + l_k is numerically zero or
/// when the residual check fails.
Eigen::MatrixXd lyap_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& rhs);

/// ||A P + P A^T + rhs||_F.
double lyap_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& P,
                     const Eigen::MatrixXd& rhs);

/// S(omega) = (1/2pi) int_{-omega}^{omega} (j nu I - A)^{-1} d nu
///          = (j/2pi) logm((A + j omega I)(A - j omega I)^{-1}),
/// evaluated through the eigendecomposition of A with one principal log per
/// eigenvalue.
Eigen::MatrixXcd s_omega(const Eigen::MatrixXd& A, double omega);

struct GramianPair {
  Eigen::MatrixXd P;  // reachability
  Eigen::MatrixXd Q;  // observability
  double residual_P = 0.0;
  double residual_Q = 0.0;
};

/// Infinite-horizon Gramians of a stable model.
GramianPair gramians(const StateSpaceModel& model);

/// Frequency-limited Gramians over [-omega, omega] of a stable model.
GramianPair freq_limited_gramians(const StateSpaceModel& model, double omega);

/// tr(C P C^T) and tr(B^T Q B), averaged. Stable, strictly proper models only.
NormResult h2_gramian(const StateSpaceModel& model);
NormResult h2w_gramian(const StateSpaceModel& model, double omega);

/// Band form via difference of the two upper bounds.
NormResult h2w_gramian_band(const StateSpaceModel& model, const FrequencyBand& band);

}  // namespace h2wkit

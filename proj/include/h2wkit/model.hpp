#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace h2wkit {

using Complex = std::complex<double>;

/// Continuous-time LTI model x' = Ax + Bu, y = Cx + Du.
///
/// Immutable once constructed; the constructor checks dimension consistency
/// and rejects non-finite entries.
class StateSpaceModel {
 public:
  StateSpaceModel(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C,
                  Eigen::MatrixXd D);

  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::MatrixXd& B() const { return B_; }
  const Eigen::MatrixXd& C() const { return C_; }
  const Eigen::MatrixXd& D() const { return D_; }

  std::size_t order() const { return static_cast<std::size_t>(A_.rows()); }
  std::size_t inputs() const { return static_cast<std::size_t>(B_.cols()); }
  std::size_t outputs() const { return static_cast<std::size_t>(C_.rows()); }

  bool strictly_proper() const { return D_.isZero(0.0); }

 private:
  Eigen::MatrixXd A_, B_, C_, D_;
};

/// H(s) = C (sI - A)^{-1} B + D through an LU solve of (sI - A) X = B.
/// Throws kSingularShift when sI - A is numerically singular.
Eigen::MatrixXcd eval_transfer(const StateSpaceModel& model, Complex s);

/// Eigenvalues with matching right (A x = l x) and left (y^* A = l y^*)
/// eigenvectors stored column-wise.
struct EigenTriplets {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd right;
  Eigen::MatrixXcd left;
};

/// Pluggable dense (or sparse) eigensolver.
using EigenSolverFn = std::function<EigenTriplets(const Eigen::MatrixXd&)>;

/// LAPACK dgeev: one decomposition yields both eigenvector sets.
EigenTriplets lapack_eigen_triplets(const Eigen::MatrixXd& A);

/// Two Eigen decompositions (of A and of A^T) paired by nearest eigenvalue.
EigenTriplets eigen_pair_triplets(const Eigen::MatrixXd& A);

struct SpectralData {
  Eigen::VectorXcd eigenvalues;
  std::vector<Eigen::MatrixXcd> residues;  // ny x nu each
  double min_pairwise_gap = 0.0;
  // max_i ||x_i|| ||y_i|| / |y_i^* x_i|, i.e. the worst eigenvalue condition.
  double eigvec_condition = 0.0;
  double spectral_radius = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
};

struct DecomposeOptions {
  // Poles count as repeated when the minimum pairwise gap falls below
  // gap_tol * max(1, spectral radius).
  double gap_tol = 1e-8;
  // Near-defective when |y^* x| < near_defective_tol * ||x|| ||y||.
  double near_defective_tol = 1e-10;
  EigenSolverFn solver = lapack_eigen_triplets;
};

/// phi = C x y^* B / (y^* x). Invariant under any rescaling of x or y.
Eigen::MatrixXcd residue_from_eigvecs(const Eigen::MatrixXd& C,
                                      const Eigen::MatrixXd& B,
                                      const Eigen::VectorXcd& x,
                                      const Eigen::VectorXcd& y);

SpectralData spectral_decompose(const StateSpaceModel& model,
                                const DecomposeOptions& options = {});

/// True when every (lambda, phi) pair has a conjugate partner within
/// rel_tol, pairing by nearest eigenvalue.
bool conjugate_closed(const SpectralData& spectrum, double rel_tol);

double spectral_radius(const Eigen::VectorXcd& eigenvalues);
double min_pairwise_gap(const Eigen::VectorXcd& eigenvalues);

/// Default imaginary-axis tolerance: 1e-9 * max(1, spectral radius).
double default_imag_tol(const Eigen::VectorXcd& eigenvalues);

class FrequencyBand {
 public:
  /// Requires 0 <= lo < hi < inf (rad/s).
  FrequencyBand(double omega_lo, double omega_hi);
  static FrequencyBand upto(double omega) { return {0.0, omega}; }

  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  double lo_, hi_;
};

struct PoleClassification {
  std::vector<std::size_t> stable;      // Re < -tol
  std::vector<std::size_t> antistable;  // Re > +tol
  std::vector<std::size_t> imaginary;   // |Re| <= tol
  double tol = 0.0;

  bool all_stable() const { return antistable.empty() && imaginary.empty(); }
};

PoleClassification classify_poles(const Eigen::VectorXcd& eigenvalues,
                                  double tol);

struct BandCheck {
  bool ok = true;
  // Smallest |lambda| over the imaginary set; +inf when the set is empty.
  double bound = 0.0;
  std::vector<std::size_t> offending;
};

/// ok iff no imaginary pole or omega_hi < min |lambda_im|.
BandCheck validate_band(const PoleClassification& classification,
                        const Eigen::VectorXcd& eigenvalues,
                        const FrequencyBand& band);

/// Same test against a single upper bound omega >= 0.
BandCheck validate_bound(const PoleClassification& classification,
                         const Eigen::VectorXcd& eigenvalues, double omega);

}  // namespace h2wkit

#include "h2wkit/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <lapacke.h>

#include "h2wkit/error.hpp"
#include "lapack_check.hpp"

namespace h2wkit {

namespace {

void check_finite(const Eigen::MatrixXd& m, const char* name) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("matrix ") + name + " has non-finite entries");
  }
}

std::string dims(const Eigen::MatrixXd& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

// Right vectors from Eigen, left vectors as the rows of V^{-1}.
EigenTriplets eigen_inverse_triplets(const Eigen::MatrixXd& A) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, true);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::kSolverFailure, "Eigen::EigenSolver did not converge");
  }
  EigenTriplets out;
  out.values = es.eigenvalues();
  out.right = es.eigenvectors();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(out.right);
  if (!(lu.rcond() > 1e-14)) {
    throw Error(ErrorCode::kDegenerateSpectrum, "eigenvector matrix is numerically singular");
  }
  out.left = lu.inverse().adjoint();
  return out;
}

}  // namespace

StateSpaceModel::StateSpaceModel(Eigen::MatrixXd A, Eigen::MatrixXd B,
                                 Eigen::MatrixXd C, Eigen::MatrixXd D)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(std::move(D)) {
  const auto n = A_.rows();
  if (n < 1 || A_.cols() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "A must be square and non-empty, got " + dims(A_));
  }
  if (B_.rows() != n || B_.cols() < 1) {
    throw Error(ErrorCode::kDimensionMismatch,
                "B must have " + std::to_string(n) + " rows, got " + dims(B_));
  }
  if (C_.cols() != n || C_.rows() < 1) {
    throw Error(ErrorCode::kDimensionMismatch,
                "C must have " + std::to_string(n) + " columns, got " + dims(C_));
  }
  if (D_.rows() != C_.rows() || D_.cols() != B_.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "D must be " + std::to_string(C_.rows()) + "x" +
                    std::to_string(B_.cols()) + ", got " + dims(D_));
  }
  check_finite(A_, "A");
  check_finite(B_, "B");
  check_finite(C_, "C");
  check_finite(D_, "D");
}

Eigen::MatrixXcd eval_transfer(const StateSpaceModel& model, Complex s) {
  Eigen::MatrixXcd shifted = -model.A().cast<Complex>();
  shifted.diagonal().array() += s;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(shifted);
  if (!(lu.rcond() > 1e-15)) {
    std::ostringstream os;
    os << "sI - A is numerically singular at s = " << s;
    throw Error(ErrorCode::kSingularShift, os.str());
  }
  Eigen::MatrixXcd X = lu.solve(model.B().cast<Complex>());
  Eigen::MatrixXcd H = model.C().cast<Complex>() * X;
  H += model.D().cast<Complex>();
  return H;
}

EigenTriplets lapack_eigen_triplets(const Eigen::MatrixXd& A) {
  const lapack_int n = static_cast<lapack_int>(A.rows());
  Eigen::MatrixXd work = A;  // dgeev overwrites its input
  Eigen::VectorXd wr(n), wi(n);
  Eigen::MatrixXd vl(n, n), vr(n, n);
  const lapack_int info =
      LAPACKE_dgeev(LAPACK_COL_MAJOR, 'V', 'V', n, work.data(), n, wr.data(),
                    wi.data(), vl.data(), n, vr.data(), n);
  if (info != 0) {
    throw Error(ErrorCode::kSolverFailure,
                "dgeev failed with info = " + std::to_string(info));
  }

  EigenTriplets out;
  out.values.resize(n);
  out.right.resize(n, n);
  out.left.resize(n, n);
  for (lapack_int j = 0; j < n; ++j) {
    if (wi(j) == 0.0) {
      out.values(j) = Complex(wr(j), 0.0);
      out.right.col(j) = vr.col(j).cast<Complex>();
      out.left.col(j) = vl.col(j).cast<Complex>();
      continue;
    }
    // Conjugate pair stored as (re, im) in columns j, j+1.
    const Complex i1(0.0, 1.0);
    out.values(j) = Complex(wr(j), wi(j));
    out.values(j + 1) = Complex(wr(j + 1), wi(j + 1));
    out.right.col(j) = vr.col(j).cast<Complex>() + i1 * vr.col(j + 1).cast<Complex>();
    out.right.col(j + 1) = out.right.col(j).conjugate();
    out.left.col(j) = vl.col(j).cast<Complex>() + i1 * vl.col(j + 1).cast<Complex>();
    out.left.col(j + 1) = out.left.col(j).conjugate();
    ++j;
  }
  if (!detail::eigenpairs_accurate(A, out.values, out.right, false) ||
      !detail::eigenpairs_accurate(A, out.values, out.left, true)) {
    return eigen_inverse_triplets(A);
  }
  return out;
}

EigenTriplets eigen_pair_triplets(const Eigen::MatrixXd& A) {
  Eigen::EigenSolver<Eigen::MatrixXd> right(A, true);
  Eigen::EigenSolver<Eigen::MatrixXd> left(A.transpose(), true);
  if (right.info() != Eigen::Success || left.info() != Eigen::Success) {
    throw Error(ErrorCode::kSolverFailure, "Eigen::EigenSolver did not converge");
  }
  const auto n = A.rows();
  EigenTriplets out;
  out.values = right.eigenvalues();
  out.right = right.eigenvectors();
  out.left.resize(n, n);

  // A^T w = l w  <=>  conj(w)^* A = l conj(w)^*, so y = conj(w).
  const Eigen::VectorXcd lvals = left.eigenvalues();
  const Eigen::MatrixXcd lvecs = left.eigenvectors();
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < n; ++k) {
      if (used[static_cast<std::size_t>(k)]) continue;
      const double d = std::abs(lvals(k) - out.values(i));
      if (d < best_dist) {
        best_dist = d;
        best = k;
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    out.left.col(i) = lvecs.col(best).conjugate();
  }
  return out;
}

Eigen::MatrixXcd residue_from_eigvecs(const Eigen::MatrixXd& C,
                                      const Eigen::MatrixXd& B,
                                      const Eigen::VectorXcd& x,
                                      const Eigen::VectorXcd& y) {
  const Complex yx = y.dot(x);  // y^* x
  const Eigen::VectorXcd cx = C.cast<Complex>() * x;
  const Eigen::RowVectorXcd yb = y.adjoint() * B.cast<Complex>();
  return (cx * yb) / yx;
}

double spectral_radius(const Eigen::VectorXcd& eigenvalues) {
  double rho = 0.0;
  for (const auto& l : eigenvalues) rho = std::max(rho, std::abs(l));
  return rho;
}

double min_pairwise_gap(const Eigen::VectorXcd& eigenvalues) {
  double gap = std::numeric_limits<double>::infinity();
  const auto n = eigenvalues.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = i + 1; k < n; ++k) {
      gap = std::min(gap, std::abs(eigenvalues(i) - eigenvalues(k)));
    }
  }
  return gap;
}

double default_imag_tol(const Eigen::VectorXcd& eigenvalues) {
  return 1e-9 * std::max(1.0, spectral_radius(eigenvalues));
}

SpectralData spectral_decompose(const StateSpaceModel& model,
                                const DecomposeOptions& options) {
  const EigenTriplets eig = options.solver(model.A());
  const auto n = eig.values.size();

  SpectralData out;
  out.eigenvalues = eig.values;
  out.spectral_radius = spectral_radius(eig.values);
  out.min_pairwise_gap = min_pairwise_gap(eig.values);

  const double gap_floor = options.gap_tol * std::max(1.0, out.spectral_radius);
  if (n > 1 && out.min_pairwise_gap < gap_floor) {
    std::ostringstream os;
    os << "repeated poles: minimum eigenvalue gap " << out.min_pairwise_gap
       << " below " << gap_floor;
    throw Error(ErrorCode::kDegenerateSpectrum, os.str());
  }

  out.residues.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXcd x = eig.right.col(i);
    const Eigen::VectorXcd y = eig.left.col(i);
    const double scale = x.norm() * y.norm();
    const double overlap = std::abs(y.dot(x));
    if (!(overlap >= options.near_defective_tol * scale)) {
      std::ostringstream os;
      os << "near-defective eigenvalue " << eig.values(i)
         << ": |y^* x| = " << overlap << " relative to " << scale;
      throw Error(ErrorCode::kDegenerateSpectrum, os.str());
    }
    out.eigvec_condition = std::max(out.eigvec_condition, scale / overlap);
    out.residues.push_back(residue_from_eigvecs(model.C(), model.B(), x, y));
  }
  return out;
}

bool conjugate_closed(const SpectralData& spectrum, double rel_tol) {
  const auto n = spectrum.eigenvalues.size();
  double residue_scale = 0.0;
  for (const auto& phi : spectrum.residues) {
    residue_scale = std::max(residue_scale, phi.norm());
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex target = std::conj(spectrum.eigenvalues(i));
    Eigen::Index best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < n; ++k) {
      const double d = std::abs(spectrum.eigenvalues(k) - target);
      if (d < best_dist) {
        best_dist = d;
        best = k;
      }
    }
    if (best_dist > rel_tol * std::max(1.0, std::abs(target))) return false;
    const auto& phi_i = spectrum.residues[static_cast<std::size_t>(i)];
    const auto& phi_k = spectrum.residues[static_cast<std::size_t>(best)];
    if ((phi_k - phi_i.conjugate()).norm() > rel_tol * residue_scale) {
      return false;
    }
  }
  return true;
}

FrequencyBand::FrequencyBand(double omega_lo, double omega_hi)
    : lo_(omega_lo), hi_(omega_hi) {
  if (!(omega_lo >= 0.0) || !(omega_lo < omega_hi) || !std::isfinite(omega_hi)) {
    std::ostringstream os;
    os << "invalid frequency band [" << omega_lo << ", " << omega_hi
       << "]: need 0 <= lo < hi < inf";
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
}

PoleClassification classify_poles(const Eigen::VectorXcd& eigenvalues,
                                  double tol) {
  PoleClassification out;
  out.tol = tol;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    const double re = eigenvalues(i).real();
    const auto idx = static_cast<std::size_t>(i);
    if (re < -tol) {
      out.stable.push_back(idx);
    } else if (re > tol) {
      out.antistable.push_back(idx);
    } else {
      out.imaginary.push_back(idx);
    }
  }
  return out;
}

BandCheck validate_bound(const PoleClassification& classification,
                         const Eigen::VectorXcd& eigenvalues, double omega) {
  BandCheck out;
  out.bound = std::numeric_limits<double>::infinity();
  for (const auto idx : classification.imaginary) {
    const double mag = std::abs(eigenvalues(static_cast<Eigen::Index>(idx)));
    out.bound = std::min(out.bound, mag);
    if (!(omega < mag)) out.offending.push_back(idx);
  }
  out.ok = out.offending.empty();
  return out;
}

BandCheck validate_band(const PoleClassification& classification,
                        const Eigen::VectorXcd& eigenvalues,
                        const FrequencyBand& band) {
  return validate_bound(classification, eigenvalues, band.hi());
}

}  // namespace h2wkit

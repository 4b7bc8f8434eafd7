// A posteriori checks on LAPACK factorizations. Some optimized BLAS builds
// return info = 0 with garbage factors on certain CPUs, so every LAPACK
// result is validated with Eigen's own kernels before use.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>

namespace h2wkit::detail {

constexpr double kFactorTol = 1e-9;

// max_i ||A x_i - l_i x_i|| / ((||A|| + |l_i|) ||x_i||) <= tol.
inline bool eigenpairs_accurate(const Eigen::MatrixXd& A, const Eigen::VectorXcd& values,
                                const Eigen::MatrixXcd& vectors, bool left) {
  const double anorm = A.norm();
  const Eigen::MatrixXcd Ac = left ? Eigen::MatrixXcd(A.transpose().cast<std::complex<double>>())
                                   : Eigen::MatrixXcd(A.cast<std::complex<double>>());
  const Eigen::MatrixXcd R = Ac * vectors;
  for (Eigen::Index i = 0; i < vectors.cols(); ++i) {
    const std::complex<double> l = left ? std::conj(values(i)) : values(i);
    const double res = (R.col(i) - l * vectors.col(i)).norm();
    const double scale = (anorm + std::abs(l)) * vectors.col(i).norm();
    if (!(res <= kFactorTol * std::max(scale, 1e-300))) return false;
  }
  return true;
}

// A = U T U^T with U orthogonal.
inline bool schur_accurate(const Eigen::MatrixXd& A, const Eigen::MatrixXd& U,
                           const Eigen::MatrixXd& T) {
  const auto n = A.rows();
  const double anorm = std::max(A.norm(), 1e-300);
  const double recon = (U * T * U.transpose() - A).norm();
  const double orth = (U.transpose() * U - Eigen::MatrixXd::Identity(n, n)).norm();
  return recon <= kFactorTol * anorm && orth <= kFactorTol * static_cast<double>(n);
}

}  // namespace h2wkit::detail

#include "h2wkit/gramian_norm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <lapacke.h>

#include "h2wkit/complex_fn.hpp"
#include "h2wkit/error.hpp"
#include "lapack_check.hpp"

namespace h2wkit {

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kPencilTol = 1e-10;
constexpr double kResidualTol = 1e-10;
constexpr double kRealnessTol = 1e-10;

void require_stable(const Eigen::VectorXcd& eigenvalues, const char* what) {
  const auto cls = classify_poles(eigenvalues, default_imag_tol(eigenvalues));
  if (!cls.all_stable()) {
    throw Error(ErrorCode::kUnstable,
                std::string(what) + " requires an asymptotically stable model");
  }
}

void require_strictly_proper(const StateSpaceModel& model, const char* what) {
  if (!model.strictly_proper()) {
    throw Error(ErrorCode::kNotStrictlyProper,
                std::string(what) + " requires a strictly proper model (D = 0)");
  }
}

// Right eigenpairs from LAPACK dgeev, the same kernel the spectral backend
// uses, so timings compare like with like. Eigen takes over when the LAPACK
// result fails verification.
struct RightEigen {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors;
};

RightEigen right_eigen(const Eigen::MatrixXd& A) {
  const lapack_int n = static_cast<lapack_int>(A.rows());
  Eigen::MatrixXd work = A;
  Eigen::VectorXd wr(n), wi(n);
  Eigen::MatrixXd vr(n, n);
  double vl_dummy = 0.0;
  const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'V', n, work.data(), n,
                                        wr.data(), wi.data(), &vl_dummy, 1, vr.data(), n);
  if (info != 0) {
    throw Error(ErrorCode::kSolverFailure, "dgeev failed with info = " + std::to_string(info));
  }
  RightEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (lapack_int j = 0; j < n; ++j) {
    out.values(j) = Complex(wr(j), wi(j));
    if (wi(j) == 0.0) {
      out.vectors.col(j) = vr.col(j).cast<Complex>();
    } else {
      out.vectors.col(j) = vr.col(j).cast<Complex>() + Complex(0, 1) * vr.col(j + 1).cast<Complex>();
      out.vectors.col(j + 1) = out.vectors.col(j).conjugate();
      out.values(j + 1) = Complex(wr(j + 1), wi(j + 1));
      ++j;
    }
  }
  if (detail::eigenpairs_accurate(A, out.values, out.vectors, false)) return out;

  Eigen::EigenSolver<Eigen::MatrixXd> es(A, true);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::kSolverFailure, "Eigen::EigenSolver did not converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

Eigen::VectorXcd eigenvalues_of(const Eigen::MatrixXd& A) { return right_eigen(A).values; }

// S(omega) together with the spectrum it was built from.
Eigen::MatrixXcd s_omega_impl(const Eigen::MatrixXd& A, double omega,
                              Eigen::VectorXcd& eigenvalues) {
  if (!(omega >= 0.0) || !std::isfinite(omega)) {
    throw Error(ErrorCode::kInvalidArgument, "omega must be finite and >= 0");
  }
  const auto n = A.rows();
  RightEigen es = right_eigen(A);
  eigenvalues = es.values;
  if (omega == 0.0) return Eigen::MatrixXcd::Zero(n, n);

  const double rho = std::max(1.0, spectral_radius(eigenvalues));
  if (n > 1 && min_pairwise_gap(eigenvalues) < 1e-8 * rho) {
    throw Error(ErrorCode::kDegenerateSpectrum,
                "S(omega) needs a diagonalizable A with simple eigenvalues");
  }

  const Complex jw(0.0, omega);
  Eigen::VectorXcd f(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex l = eigenvalues(i);
    if (std::abs(l - jw) < 1e-12 * rho || std::abs(l + jw) < 1e-12 * rho) {
      std::ostringstream os;
      os << "S(omega): eigenvalue " << l << " lies on +-j omega";
      throw Error(ErrorCode::kSingularShift, os.str());
    }
    f(i) = Complex(0.0, 0.5 / std::numbers::pi) * principal_log((l + jw) / (l - jw));
  }

  const Eigen::MatrixXcd& V = es.vectors;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(V);
  if (!(lu.rcond() > 1e-14)) {
    throw Error(ErrorCode::kDegenerateSpectrum,
                "S(omega): eigenvector matrix is numerically singular");
  }
  // S = V F V^{-1}  <=>  S^T = V^{-T} (V F)^T
  const Eigen::MatrixXcd VF = V * f.asDiagonal();
  const Eigen::MatrixXcd St = lu.transpose().solve(Eigen::MatrixXcd(VF.transpose()));
  return St.transpose();
}

// Real symmetric part of a Hermitian weight; the imaginary part must vanish.
Eigen::MatrixXd realify_weight(const Eigen::MatrixXcd& W, double& imag_norm) {
  imag_norm = W.imag().norm();
  const double scale = W.norm();
  if (imag_norm > kRealnessTol * scale) {
    std::ostringstream os;
    os << "frequency-limited weight has imaginary part " << imag_norm
       << " relative to " << scale;
    throw Error(ErrorCode::kSolverFailure, os.str());
  }
  Eigen::MatrixXd R = W.real();
  return 0.5 * (R + R.transpose());
}

NormResult trace_result(const StateSpaceModel& model, const GramianPair& g,
                        double rel_tol, double imag, const char* what) {
  const double via_p = (model.C() * g.P * model.C().transpose()).trace();
  const double via_q = (model.B().transpose() * g.Q * model.B()).trace();
  const double scale = std::max({std::abs(via_p), std::abs(via_q), 1e-300});
  if (std::abs(via_p - via_q) > rel_tol * scale) {
    std::ostringstream os;
    os << what << ": trace forms disagree (" << via_p << " vs " << via_q << ")";
    throw Error(ErrorCode::kSolverFailure, os.str());
  }
  return make_result(0.5 * (via_p + via_q), imag, Backend::kGramian);
}

// Eigenvalues of a quasi-triangular real Schur factor.
Eigen::VectorXcd schur_eigenvalues(const Eigen::MatrixXd& T) {
  const auto n = T.rows();
  Eigen::VectorXcd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i + 1 < n && T(i + 1, i) != 0.0) {
      const double half_tr = 0.5 * (T(i, i) + T(i + 1, i + 1));
      const double half_diff = 0.5 * (T(i, i) - T(i + 1, i + 1));
      const Complex root =
          std::sqrt(Complex(half_diff * half_diff + T(i, i + 1) * T(i + 1, i), 0.0));
      out(i) = half_tr + root;
      out(i + 1) = half_tr - root;
      ++i;
    } else {
      out(i) = T(i, i);
    }
  }
  return out;
}

}  // namespace

double lyap_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& P,
                     const Eigen::MatrixXd& rhs) {
  return (A * P + P * A.transpose() + rhs).norm();
}

Eigen::MatrixXd lyap_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& rhs) {
  const auto n = A.rows();
  if (A.cols() != n || rhs.rows() != n || rhs.cols() != n) {
    throw Error(ErrorCode::kInvalidArgument, "lyap_solve: dimension mismatch");
  }
  const auto ln = static_cast<lapack_int>(n);

  // Real Schur form A = U T U^T (dgees, Eigen when that fails verification),
  // then T Y + Y T^T = -U^T rhs U on the quasi-triangular factor (dtrsyl) and
  // P = U Y U^T.
  Eigen::MatrixXd T = A;
  Eigen::MatrixXd U(n, n);
  Eigen::VectorXd wr(n), wi(n);
  lapack_int sdim = 0;
  lapack_int info = LAPACKE_dgees(LAPACK_COL_MAJOR, 'V', 'N', nullptr, ln, T.data(), ln, &sdim,
                                  wr.data(), wi.data(), U.data(), ln);
  if (info != 0 || !detail::schur_accurate(A, U, T)) {
    Eigen::RealSchur<Eigen::MatrixXd> rs(A);
    if (rs.info() != Eigen::Success) {
      throw Error(ErrorCode::kSolverFailure, "real Schur iteration did not converge");
    }
    T = rs.matrixT();
    U = rs.matrixU();
  }
  const Eigen::VectorXcd lambda = schur_eigenvalues(T);

  double rho = 1.0;
  for (const auto& l : lambda) rho = std::max(rho, std::abs(l));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (std::abs(lambda(i) + lambda(k)) <= kPencilTol * rho) {
        std::ostringstream os;
        os << "singular Lyapunov operator: eigenvalues " << lambda(i) << " and " << lambda(k)
           << " sum to zero";
        throw Error(ErrorCode::kSolverFailure, os.str());
      }
    }
  }

  Eigen::MatrixXd Y = -(U.transpose() * rhs * U);
  double scale = 1.0;
  info = LAPACKE_dtrsyl(LAPACK_COL_MAJOR, 'N', 'T', 1, ln, ln, T.data(), ln, T.data(), ln,
                        Y.data(), ln, &scale);
  if (info < 0) {
    throw Error(ErrorCode::kSolverFailure, "dtrsyl failed with info = " + std::to_string(info));
  }
  Y /= scale;

  Eigen::MatrixXd P = U * Y * U.transpose();
  if (rhs == rhs.transpose()) {
    P = 0.5 * (P + P.transpose()).eval();
  }

  const double res = lyap_residual(A, P, rhs);
  const double bound = kResidualTol * (A.norm() * P.norm() + rhs.norm());
  if (!(res <= bound)) {
    std::ostringstream os;
    os << "Lyapunov residual " << res << " exceeds " << bound;
    throw Error(ErrorCode::kSolverFailure, os.str());
  }
  return P;
}

Eigen::MatrixXcd s_omega(const Eigen::MatrixXd& A, double omega) {
  Eigen::VectorXcd eigenvalues;
  return s_omega_impl(A, omega, eigenvalues);
}

GramianPair gramians(const StateSpaceModel& model) {
  require_stable(eigenvalues_of(model.A()), "gramians");
  const Eigen::MatrixXd BBt = model.B() * model.B().transpose();
  const Eigen::MatrixXd CtC = model.C().transpose() * model.C();
  GramianPair g;
  g.P = lyap_solve(model.A(), BBt);
  g.Q = lyap_solve(model.A().transpose(), CtC);
  g.residual_P = lyap_residual(model.A(), g.P, BBt);
  g.residual_Q = lyap_residual(model.A().transpose(), g.Q, CtC);
  return g;
}

namespace {

GramianPair freq_limited_impl(const StateSpaceModel& model, double omega,
                              double& imag_norm) {
  Eigen::VectorXcd eigenvalues;
  const Eigen::MatrixXcd S = s_omega_impl(model.A(), omega, eigenvalues);
  require_stable(eigenvalues, "frequency-limited Gramians");

  const Eigen::MatrixXcd BBt = (model.B() * model.B().transpose()).cast<Complex>();
  const Eigen::MatrixXcd CtC = (model.C().transpose() * model.C()).cast<Complex>();
  const Eigen::MatrixXcd Wc_c = S * BBt + BBt * S.adjoint();
  const Eigen::MatrixXcd Wo_c = S.adjoint() * CtC + CtC * S;
  double imag_c = 0.0, imag_o = 0.0;
  const Eigen::MatrixXd Wc = realify_weight(Wc_c, imag_c);
  const Eigen::MatrixXd Wo = realify_weight(Wo_c, imag_o);
  imag_norm = std::max(imag_c, imag_o);

  GramianPair g;
  g.P = lyap_solve(model.A(), Wc);
  g.Q = lyap_solve(model.A().transpose(), Wo);
  g.residual_P = lyap_residual(model.A(), g.P, Wc);
  g.residual_Q = lyap_residual(model.A().transpose(), g.Q, Wo);
  return g;
}

}  // namespace

GramianPair freq_limited_gramians(const StateSpaceModel& model, double omega) {
  double imag = 0.0;
  return freq_limited_impl(model, omega, imag);
}

NormResult h2_gramian(const StateSpaceModel& model) {
  const auto start = Clock::now();
  require_strictly_proper(model, "h2_gramian");
  const GramianPair g = gramians(model);
  NormResult r = trace_result(model, g, 1e-10, 0.0, "h2_gramian");
  r.elapsed = Clock::now() - start;
  return r;
}

NormResult h2w_gramian(const StateSpaceModel& model, double omega) {
  const auto start = Clock::now();
  require_strictly_proper(model, "h2w_gramian");
  double imag = 0.0;
  const GramianPair g = freq_limited_impl(model, omega, imag);
  NormResult r = trace_result(model, g, 1e-8, imag, "h2w_gramian");
  r.elapsed = Clock::now() - start;
  return r;
}

NormResult h2w_gramian_band(const StateSpaceModel& model, const FrequencyBand& band) {
  const auto start = Clock::now();
  const NormResult hi = h2w_gramian(model, band.hi());
  const NormResult lo = h2w_gramian(model, band.lo());
  double diff = hi.value_sq - lo.value_sq;
  if (diff < 0.0) {
    if (-diff > kRealnessTol * std::max(1.0, hi.value_sq)) {
      throw Error(ErrorCode::kSolverFailure, "band norm came out negative");
    }
    diff = 0.0;
  }
  NormResult r = make_result(diff, std::max(hi.imag_residual, lo.imag_residual),
                             Backend::kGramian);
  r.elapsed = Clock::now() - start;
  return r;
}

}  // namespace h2wkit

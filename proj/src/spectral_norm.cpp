#include "h2wkit/spectral_norm.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "h2wkit/complex_fn.hpp"
#include "h2wkit/error.hpp"

namespace h2wkit {

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kPi = std::numbers::pi;

// Neumaier summation, applied to real and imaginary parts separately.
class CompensatedSum {
 public:
  void add(Complex v) {
    add(re_, re_c_, v.real());
    add(im_, im_c_, v.imag());
  }
  Complex value() const { return {re_ + re_c_, im_ + im_c_}; }

 private:
  static void add(double& sum, double& comp, double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  double re_ = 0.0, re_c_ = 0.0, im_ = 0.0, im_c_ = 0.0;
};

double imag_tol_for(const SpectralData& spectrum, const SpectralOptions& options) {
  return options.imag_tol ? *options.imag_tol
                          : default_imag_tol(spectrum.eigenvalues);
}

// Rows are the residues flattened column-major; G = R R^T then holds
// tr(phi_i phi_k^T) without conjugation.
Eigen::MatrixXcd residue_rows(const SpectralData& spectrum) {
  const auto n = static_cast<Eigen::Index>(spectrum.size());
  const Eigen::Index m = n > 0 ? spectrum.residues.front().size() : 0;
  Eigen::MatrixXcd R(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& phi = spectrum.residues[static_cast<std::size_t>(i)];
    R.row(i) = Eigen::Map<const Eigen::RowVectorXcd>(phi.data(), phi.size());
  }
  return R;
}

NormResult realify(Complex total, Backend backend, const SpectralOptions& options,
                   const char* what) {
  const double value_sq = total.real();
  const double imag = std::abs(total.imag());
  if (imag > options.realness_tol * std::max(1.0, std::abs(value_sq))) {
    std::ostringstream os;
    os << what << ": imaginary residual " << imag << " exceeds tolerance for value "
       << value_sq;
    throw Error(ErrorCode::kSolverFailure, os.str());
  }
  return make_result(value_sq, imag, backend);
}

void require_strictly_proper(const Eigen::MatrixXd& D, const char* what) {
  if (!D.isZero(0.0)) {
    throw Error(ErrorCode::kNotStrictlyProper,
                std::string(what) + " requires a strictly proper model (D = 0)");
  }
}

void require_stable(const SpectralData& spectrum, const SpectralOptions& options,
                    const char* what) {
  const auto cls = classify_poles(spectrum.eigenvalues, imag_tol_for(spectrum, options));
  if (!cls.all_stable()) {
    std::ostringstream os;
    os << what << " requires all poles strictly in the left half-plane ("
       << cls.antistable.size() << " antistable, " << cls.imaginary.size()
       << " on the imaginary axis)";
    throw Error(ErrorCode::kUnstable, os.str());
  }
}

bool has_antistable(const SpectralData& spectrum, const SpectralOptions& options) {
  return !classify_poles(spectrum.eigenvalues, imag_tol_for(spectrum, options))
              .antistable.empty();
}

}  // namespace

const char* to_string(LimitRegime regime) {
  switch (regime) {
    case LimitRegime::kStable: return "stable";
    case LimitRegime::kUnstable: return "unstable";
    case LimitRegime::kImaginary: return "imaginary";
  }
  return "?";
}

Eigen::VectorXcd modal_weights(const SpectralData& spectrum, double omega) {
  Eigen::VectorXcd w(spectrum.eigenvalues.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    w(i) = -(2.0 / kPi) * atan_principal(omega / spectrum.eigenvalues(i));
  }
  return w;
}

NormResult h2_spectral(const SpectralData& spectrum, const StateSpaceModel& model,
                       const SpectralOptions& options) {
  const auto start = Clock::now();
  require_strictly_proper(model.D(), "h2_spectral");
  require_stable(spectrum, options, "h2_spectral");

  CompensatedSum sum;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const Complex l = spectrum.eigenvalues(static_cast<Eigen::Index>(i));
    const Eigen::MatrixXcd H = eval_transfer(model, -l);
    sum.add((spectrum.residues[i].array() * H.array()).sum());
  }
  NormResult r = realify(sum.value(), Backend::kSpectral, options, "h2_spectral");
  r.elapsed = Clock::now() - start;
  return r;
}

NormResult h2w_spectral(const SpectralData& spectrum, const Eigen::MatrixXd& D,
                        double omega, const SpectralOptions& options) {
  const auto start = Clock::now();
  if (!(omega >= 0.0) || !std::isfinite(omega)) {
    throw Error(ErrorCode::kInvalidArgument, "omega must be finite and >= 0");
  }
  const bool unstable = has_antistable(spectrum, options);
  if (omega == 0.0) {
    NormResult r = make_result(0.0, 0.0, Backend::kSpectral);
    r.h2_interpretation = !unstable;
    r.elapsed = Clock::now() - start;
    return r;
  }

  const auto cls = classify_poles(spectrum.eigenvalues, imag_tol_for(spectrum, options));
  const BandCheck check = validate_bound(cls, spectrum.eigenvalues, omega);
  if (!check.ok) {
    std::ostringstream os;
    os << "omega = " << omega << " must stay below the smallest purely imaginary pole |"
       << check.bound << "|; offending poles:";
    for (const auto idx : check.offending) {
      os << ' ' << spectrum.eigenvalues(static_cast<Eigen::Index>(idx));
    }
    throw Error(ErrorCode::kBandViolation, os.str());
  }

  const auto n = static_cast<Eigen::Index>(spectrum.size());
  const Eigen::VectorXcd& l = spectrum.eigenvalues;
  const double degenerate = options.degeneracy_tol * std::max(1.0, spectrum.spectral_radius);

  Eigen::VectorXcd at(n);
  for (Eigen::Index i = 0; i < n; ++i) at(i) = atan_principal(omega / l(i));

  const Eigen::MatrixXcd R = residue_rows(spectrum);
  const Eigen::MatrixXcd G = R * R.transpose();

  CompensatedSum sum;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const Complex s = l(i) + l(k);
      if (std::abs(s) > degenerate) {
        sum.add((2.0 / kPi) * G(i, k) / s * at(i));
      } else {
        sum.add(-(1.0 / kPi) * omega * G(i, k) / (omega * omega + l(i) * l(i)));
      }
    }
  }

  if (!D.isZero(0.0)) {
    sum.add(Complex(omega / kPi * D.squaredNorm(), 0.0));
    const Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(D.data(), D.size());
    const Eigen::VectorXcd phi_d = R * d.cast<Complex>();  // tr(phi_i D^T)
    for (Eigen::Index i = 0; i < n; ++i) {
      sum.add(-(2.0 / kPi) * phi_d(i) * at(i));
    }
  }

  NormResult r = realify(sum.value(), Backend::kSpectral, options, "h2w_spectral");
  r.h2_interpretation = !unstable;
  r.elapsed = Clock::now() - start;
  return r;
}

NormResult h2w_spectral_corollary(const SpectralData& spectrum,
                                  const StateSpaceModel& model, double omega,
                                  const SpectralOptions& options) {
  const auto start = Clock::now();
  require_strictly_proper(model.D(), "h2w_spectral_corollary");
  require_stable(spectrum, options, "h2w_spectral_corollary");
  if (!(omega >= 0.0) || !std::isfinite(omega)) {
    throw Error(ErrorCode::kInvalidArgument, "omega must be finite and >= 0");
  }

  const Eigen::VectorXcd w = modal_weights(spectrum, omega);
  CompensatedSum sum;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    const Eigen::MatrixXcd H = eval_transfer(model, -spectrum.eigenvalues(idx));
    sum.add((spectrum.residues[i].array() * H.array()).sum() * w(idx));
  }
  NormResult r = realify(sum.value(), Backend::kSpectral, options,
                         "h2w_spectral_corollary");
  r.elapsed = Clock::now() - start;
  return r;
}

NormResult h2w_band(const SpectralData& spectrum, const Eigen::MatrixXd& D,
                    const FrequencyBand& band, const SpectralOptions& options) {
  const auto start = Clock::now();
  const NormResult hi = h2w_spectral(spectrum, D, band.hi(), options);
  const NormResult lo = h2w_spectral(spectrum, D, band.lo(), options);
  double diff = hi.value_sq - lo.value_sq;
  if (diff < 0.0) {
    if (-diff > options.realness_tol * std::max(1.0, std::abs(hi.value_sq))) {
      std::ostringstream os;
      os << "band norm came out negative (" << diff << ")";
      throw Error(ErrorCode::kSolverFailure, os.str());
    }
    diff = 0.0;
  }
  NormResult r = make_result(diff, std::max(hi.imag_residual, lo.imag_residual),
                             Backend::kSpectral);
  r.h2_interpretation = hi.h2_interpretation;
  r.elapsed = Clock::now() - start;
  return r;
}

LimitResult h2w_limit(const SpectralData& spectrum,
                      const PoleClassification& classification,
                      const SpectralOptions& options) {
  LimitResult out;
  if (!classification.imaginary.empty()) {
    out.regime = LimitRegime::kImaginary;
    out.value_sq = std::numeric_limits<double>::infinity();
    return out;
  }
  out.regime = classification.antistable.empty() ? LimitRegime::kStable
                                                 : LimitRegime::kUnstable;

  const auto n = static_cast<Eigen::Index>(spectrum.size());
  // atan(omega/l) -> -pi/2 for stable l and +pi/2 for antistable l, so each
  // arctangent pair term tends to -sign_i tr(phi_i phi_k^T)/(l_i + l_k); the
  // double-pole terms decay like 1/omega.
  Eigen::VectorXd sign = Eigen::VectorXd::Ones(n);
  for (const auto idx : classification.antistable) {
    sign(static_cast<Eigen::Index>(idx)) = -1.0;
  }
  const Eigen::VectorXcd& l = spectrum.eigenvalues;
  const double degenerate = options.degeneracy_tol * std::max(1.0, spectrum.spectral_radius);
  const Eigen::MatrixXcd R = residue_rows(spectrum);
  const Eigen::MatrixXcd G = R * R.transpose();

  CompensatedSum sum;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const Complex s = l(i) + l(k);
      if (std::abs(s) > degenerate) sum.add(-sign(i) * G(i, k) / s);
    }
  }
  const NormResult r = realify(sum.value(), Backend::kSpectral, options, "h2w_limit");
  out.value_sq = r.value_sq;
  out.imag_residual = r.imag_residual;
  return out;
}

}  // namespace h2wkit

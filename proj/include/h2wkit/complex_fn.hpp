#pragma once

#include <complex>

namespace h2wkit {

/// The two textbook formulations of the principal complex arctangent:
///   kSumOfLogs  : (1/2j) [log(1 + jz) - log(1 - jz)]
///   kLogOfRatio : (1/2j)  log((1 + jz) / (1 - jz))
/// They coincide except on Re z = 0, Im z < -1, where kLogOfRatio is larger
/// by exactly pi. The norm engine always uses kSumOfLogs.
enum class AtanVariant { kSumOfLogs, kLogOfRatio };

/// Principal argument in (-pi, pi]. The negative real axis maps to +pi
/// regardless of the sign of the imaginary zero. Throws kDomain at z = 0.
double principal_arg(std::complex<double> z);

/// ln|z| + j arg(z). Throws kDomain at z = 0.
std::complex<double> principal_log(std::complex<double> z);

/// Throws kDomain at z = +-j.
std::complex<double> atan_principal(std::complex<double> z,
                                    AtanVariant variant = AtanVariant::kSumOfLogs);

/// atan(1/z). Throws kDomain at z in {0, +-j}.
std::complex<double> acot_principal(std::complex<double> z,
                                    AtanVariant variant = AtanVariant::kSumOfLogs);

}  // namespace h2wkit

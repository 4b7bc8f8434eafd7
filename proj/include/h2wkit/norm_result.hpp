#pragma once

#include <chrono>
#include <cmath>

namespace h2wkit {

enum class Backend { kSpectral, kGramian, kQuadrature };

const char* to_string(Backend backend);

struct NormResult {
  double value_sq = 0.0;
  double value = 0.0;  // sqrt(value_sq)
  // |Im| of the complex-arithmetic sum before realification.
  double imag_residual = 0.0;
  Backend backend = Backend::kSpectral;
  std::chrono::nanoseconds elapsed{0};
  // False for models with antistable poles: the band integral is still
  // well defined but no longer bounded by an H2 norm.
  bool h2_interpretation = true;
};

inline NormResult make_result(double value_sq, double imag_residual,
                              Backend backend) {
  NormResult r;
  r.value_sq = value_sq;
  r.value = std::sqrt(value_sq);
  r.imag_residual = imag_residual;
  r.backend = backend;
  return r;
}

}  // namespace h2wkit

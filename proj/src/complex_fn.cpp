#include "h2wkit/complex_fn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "h2wkit/error.hpp"

namespace h2wkit {

namespace {

using Complex = std::complex<double>;

[[noreturn]] void domain_error(const char* fn, Complex z) {
  std::ostringstream os;
  os << fn << " undefined at z = " << z;
  throw Error(ErrorCode::kDomain, os.str());
}

// j * z written out so that signed zeros are carried through unchanged.
Complex times_j(Complex z) { return {-z.imag(), z.real()}; }

// ln|z|, with log1p near the unit circle where |z| - 1 would cancel.
double log_modulus(Complex z) {
  const double x = z.real();
  const double y = z.imag();
  const double ax = std::abs(x);
  const double ay = std::abs(y);
  const double big = std::max(ax, ay);
  if (big > 0.5 && big < 2.0) {
    const double excess = ax >= ay ? (x - 1.0) * (x + 1.0) + y * y
                                   : (y - 1.0) * (y + 1.0) + x * x;
    return 0.5 * std::log1p(excess);
  }
  return std::log(std::hypot(x, y));
}

}  // namespace

double principal_arg(Complex z) {
  if (z.real() == 0.0 && z.imag() == 0.0) domain_error("arg", z);
  constexpr double pi = std::numbers::pi;
  const double a = std::atan2(z.imag(), z.real());
  if (a != -pi) return a;
  // On the cut itself (Im z = +-0) the convention picks +pi. Below the cut
  // the true angle is above -pi and atan2 merely rounded onto it.
  return z.imag() == 0.0 ? pi : std::nextafter(-pi, 0.0);
}

Complex principal_log(Complex z) {
  if (z.real() == 0.0 && z.imag() == 0.0) domain_error("log", z);
  return {log_modulus(z), principal_arg(z)};
}

Complex atan_principal(Complex z, AtanVariant variant) {
  if (z.real() == 0.0 && std::abs(z.imag()) == 1.0) domain_error("atan", z);
  const Complex jz = times_j(z);
  const Complex plus = 1.0 + jz;
  const Complex minus = 1.0 - jz;
  const Complex inv_2j(0.0, -0.5);
  if (variant == AtanVariant::kSumOfLogs) {
    return inv_2j * (principal_log(plus) - principal_log(minus));
  }
  return inv_2j * principal_log(plus / minus);
}

Complex acot_principal(Complex z, AtanVariant variant) {
  if (z.real() == 0.0 && z.imag() == 0.0) domain_error("acot", z);
  if (z.real() == 0.0 && std::abs(z.imag()) == 1.0) domain_error("acot", z);
  return atan_principal(1.0 / z, variant);
}

}  // namespace h2wkit

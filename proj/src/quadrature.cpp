#include "h2wkit/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "h2wkit/error.hpp"

namespace h2wkit {

namespace {

using Clock = std::chrono::steady_clock;

Eigen::VectorXcd eigenvalues_of(const Eigen::MatrixXd& A) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::kSolverFailure, "eigenvalue iteration did not converge");
  }
  return es.eigenvalues();
}

std::vector<double> panel_edges(const Eigen::VectorXcd& poles, const FrequencyBand& band,
                                double resonance_ratio) {
  std::vector<double> edges{band.lo(), band.hi()};
  for (const auto& l : poles) {
    const double mag = std::abs(l);
    if (mag == 0.0) continue;
    const double peak = std::abs(l.imag());
    if (std::abs(l.real()) / mag < resonance_ratio && peak > band.lo() &&
        peak < band.hi()) {
      edges.push_back(peak);
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

}  // namespace

double integrand(const StateSpaceModel& model, double nu) {
  return eval_transfer(model, Complex(0.0, nu)).squaredNorm();
}

QuadratureReport integrate_band(const StateSpaceModel& model,
                                const FrequencyBand& band,
                                const QuadratureOptions& options) {
  if (!(options.tol > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "quadrature tolerance must be > 0");
  }
  const Eigen::VectorXcd poles = eigenvalues_of(model.A());
  const auto cls = classify_poles(poles, default_imag_tol(poles));
  for (const auto idx : cls.imaginary) {
    const double mag = std::abs(poles(static_cast<Eigen::Index>(idx)));
    if (!(mag > band.hi())) {
      std::ostringstream os;
      os << "pole " << poles(static_cast<Eigen::Index>(idx))
         << " lies on the integration segment j[-" << band.hi() << ", " << band.hi()
         << "]";
      throw Error(ErrorCode::kBandViolation, os.str());
    }
  }

  QuadratureReport report;
  report.antistable_poles = cls.antistable.size();
  auto f = [&](double nu) {
    ++report.evaluations;
    return integrand(model, nu);
  };

  const std::vector<double> edges = panel_edges(poles, band, options.resonance_ratio);
  report.panels = edges.size() - 1;
  double sum = 0.0, err = 0.0;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    double panel_err = 0.0;
    sum += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, edges[p], edges[p + 1], options.max_depth, options.tol, &panel_err);
    err += panel_err;
  }

  // Integrand is even for real models: (1/2pi) * 2 * int_lo^hi.
  report.value = sum / std::numbers::pi;
  report.error_estimate = err / std::numbers::pi;
  if (!(report.error_estimate <= options.tol * std::max(1.0, report.value))) {
    std::ostringstream os;
    os << "quadrature did not converge: error estimate " << report.error_estimate
       << " above " << options.tol * std::max(1.0, report.value) << " after "
       << report.evaluations << " evaluations";
    throw Error(ErrorCode::kNonConvergence, os.str());
  }
  return report;
}

NormResult h2w_quadrature(const StateSpaceModel& model, const FrequencyBand& band,
                          const QuadratureOptions& options) {
  const auto start = Clock::now();
  const QuadratureReport q = integrate_band(model, band, options);
  NormResult r = make_result(q.value, 0.0, Backend::kQuadrature);
  r.h2_interpretation = q.antistable_poles == 0;
  r.elapsed = Clock::now() - start;
  return r;
}

}  // namespace h2wkit

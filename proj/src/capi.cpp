#include "h2wkit/h2wkit.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "h2wkit/error.hpp"
#include "h2wkit/gramian_norm.hpp"
#include "h2wkit/model.hpp"
#include "h2wkit/model_io.hpp"
#include "h2wkit/quadrature.hpp"
#include "h2wkit/spectral_norm.hpp"

struct h2w_model {
  h2wkit::StateSpaceModel model;
  std::string name;
};

struct h2w_spectrum {
  h2wkit::StateSpaceModel model;
  h2wkit::SpectralData data;
};

using namespace h2wkit;

namespace {

thread_local std::string g_last_error;

h2w_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse:
    case ErrorCode::kDimensionMismatch: return H2W_ERR_PARSE;
    case ErrorCode::kBandViolation:
    case ErrorCode::kSingularShift: return H2W_ERR_BAND;
    case ErrorCode::kDegenerateSpectrum: return H2W_ERR_DEGENERATE;
    case ErrorCode::kBackendDisagreement: return H2W_ERR_DISAGREEMENT;
    case ErrorCode::kSolverFailure:
    case ErrorCode::kNonConvergence: return H2W_ERR_SOLVER;
    case ErrorCode::kInvalidArgument: return H2W_ERR_INVALID_ARGUMENT;
    case ErrorCode::kNotStrictlyProper:
    case ErrorCode::kUnstable: return H2W_ERR_PRECONDITION;
    case ErrorCode::kDomain: return H2W_ERR_DOMAIN;
  }
  return H2W_ERR_INTERNAL;
}

template <typename F>
h2w_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return H2W_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return H2W_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return H2W_ERR_INTERNAL;
  }
}

void require(bool cond, const char* msg) {
  if (!cond) throw Error(ErrorCode::kInvalidArgument, msg);
}

Eigen::MatrixXd from_row_major(const double* data, std::size_t rows, std::size_t cols) {
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMajor>(data, static_cast<Eigen::Index>(rows),
                                    static_cast<Eigen::Index>(cols));
}

h2w_norm_result to_c(const NormResult& r) {
  h2w_norm_result out{};
  out.value_sq = r.value_sq;
  out.value = r.value;
  out.imag_residual = r.imag_residual;
  out.elapsed_seconds = std::chrono::duration<double>(r.elapsed).count();
  out.backend = static_cast<h2w_backend>(r.backend);
  out.h2_interpretation = r.h2_interpretation ? 1 : 0;
  return out;
}

void reject_imaginary_poles(const Eigen::VectorXcd& poles) {
  const auto cls = classify_poles(poles, default_imag_tol(poles));
  if (!cls.imaginary.empty()) {
    throw Error(ErrorCode::kBandViolation,
                "omega = inf: the model has purely imaginary poles, the norm diverges");
  }
}

void check_band_args(double lo, double hi) {
  require(std::isfinite(lo) && lo >= 0.0, "omega_lo must be finite and >= 0");
  require(!std::isnan(hi) && hi >= lo, "omega_hi must be >= omega_lo");
  require(std::isfinite(hi) || lo == 0.0, "an infinite band must start at 0");
}

NormResult spectral_norm(const StateSpaceModel& model, const SpectralData& spectrum,
                         double lo, double hi) {
  if (std::isinf(hi)) {
    reject_imaginary_poles(spectrum.eigenvalues);
    return h2_spectral(spectrum, model);
  }
  if (lo == 0.0) return h2w_spectral(spectrum, model.D(), hi);
  return h2w_band(spectrum, model.D(), FrequencyBand(lo, hi));
}

NormResult norm_impl(const StateSpaceModel& model, h2w_backend backend, double lo,
                     double hi, double tol) {
  check_band_args(lo, hi);
  const auto start = std::chrono::steady_clock::now();
  NormResult r;
  if (hi == lo) {
    r = make_result(0.0, 0.0, static_cast<Backend>(backend));
  } else {
    switch (backend) {
      case H2W_BACKEND_SPECTRAL: {
        const SpectralData spectrum = spectral_decompose(model);
        r = spectral_norm(model, spectrum, lo, hi);
        break;
      }
      case H2W_BACKEND_GRAMIAN:
        if (std::isinf(hi)) {
          Eigen::EigenSolver<Eigen::MatrixXd> es(model.A(), false);
          reject_imaginary_poles(es.eigenvalues());
          r = h2_gramian(model);
        } else if (lo == 0.0) {
          r = h2w_gramian(model, hi);
        } else {
          r = h2w_gramian_band(model, FrequencyBand(lo, hi));
        }
        break;
      case H2W_BACKEND_QUADRATURE: {
        require(std::isfinite(hi), "the quadrature backend needs a finite band");
        QuadratureOptions q;
        if (tol > 0.0) q.tol = tol;
        r = h2w_quadrature(model, FrequencyBand(lo, hi), q);
        break;
      }
      default:
        throw Error(ErrorCode::kInvalidArgument, "unknown backend");
    }
  }
  r.elapsed = std::chrono::steady_clock::now() - start;
  return r;
}

double rel_dev(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace

extern "C" {

const char* h2w_version(void) { return "1.0.0"; }

const char* h2w_last_error(void) { return g_last_error.c_str(); }

const char* h2w_status_string(h2w_status status) {
  switch (status) {
    case H2W_OK: return "ok";
    case H2W_ERR_PARSE: return "parse/IO error";
    case H2W_ERR_BAND: return "band violation";
    case H2W_ERR_DEGENERATE: return "degenerate spectrum";
    case H2W_ERR_DISAGREEMENT: return "backend disagreement";
    case H2W_ERR_SOLVER: return "solver failure";
    case H2W_ERR_INVALID_ARGUMENT: return "invalid argument";
    case H2W_ERR_PRECONDITION: return "precondition not met";
    case H2W_ERR_DOMAIN: return "domain error";
    case H2W_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* h2w_backend_name(h2w_backend backend) {
  return to_string(static_cast<Backend>(backend));
}

h2w_status h2w_backend_parse(const char* name, h2w_backend* out) {
  return guarded([&] {
    require(name != nullptr && out != nullptr, "null argument");
    const std::string s(name);
    if (s == "spectral") {
      *out = H2W_BACKEND_SPECTRAL;
    } else if (s == "gramian") {
      *out = H2W_BACKEND_GRAMIAN;
    } else if (s == "quadrature") {
      *out = H2W_BACKEND_QUADRATURE;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unknown backend '" + s + "'");
    }
  });
}

h2w_status h2w_model_create(size_t n, size_t nu, size_t ny, const double* a,
                            const double* b, const double* c, const double* d,
                            h2w_model** out) {
  return guarded([&] {
    require(out != nullptr && a != nullptr && b != nullptr && c != nullptr,
            "null argument");
    require(n > 0 && nu > 0 && ny > 0, "dimensions must be positive");
    Eigen::MatrixXd D = d ? from_row_major(d, ny, nu)
                          : Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ny),
                                                  static_cast<Eigen::Index>(nu));
    StateSpaceModel m(from_row_major(a, n, n), from_row_major(b, n, nu),
                      from_row_major(c, ny, n), std::move(D));
    *out = new h2w_model{std::move(m), "unnamed"};
  });
}

h2w_status h2w_model_load_file(const char* path, h2w_model** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    NamedModel nm = load_model_file(path);
    *out = new h2w_model{std::move(nm.model), std::move(nm.name)};
  });
}

h2w_status h2w_model_load_string(const char* text, size_t len, h2w_model** out) {
  return guarded([&] {
    require(text != nullptr && out != nullptr, "null argument");
    NamedModel nm = load_model_string(std::string(text, len));
    *out = new h2w_model{std::move(nm.model), std::move(nm.name)};
  });
}

h2w_status h2w_model_save_file(const h2w_model* model, const char* path) {
  return guarded([&] {
    require(model != nullptr && path != nullptr, "null argument");
    save_model_file(path, model->model, model->name);
  });
}

h2w_status h2w_model_save_string(const h2w_model* model, char* buf, size_t cap,
                                 size_t* needed) {
  return guarded([&] {
    require(model != nullptr, "null model");
    const std::string text = save_model_string(model->model, model->name);
    if (needed) *needed = text.size() + 1;
    if (buf && cap > 0) {
      const std::size_t count = std::min(cap - 1, text.size());
      std::memcpy(buf, text.data(), count);
      buf[count] = '\0';
      require(cap > text.size(), "buffer too small");
    }
  });
}

h2w_status h2w_model_random(size_t n, size_t nu, size_t ny, const char* spectrum,
                            uint64_t seed, int feedthrough, h2w_model** out) {
  return guarded([&] {
    require(spectrum != nullptr && out != nullptr, "null argument");
    const SpectrumSpec spec = parse_spectrum_spec(spectrum);
    StateSpaceModel m = random_model(n, nu, ny, spec, seed, feedthrough != 0);
    *out = new h2w_model{std::move(m),
                         "random-" + std::string(spectrum) + "-" + std::to_string(seed)};
  });
}

h2w_status h2w_model_dims(const h2w_model* model, size_t* n, size_t* nu, size_t* ny) {
  return guarded([&] {
    require(model != nullptr, "null model");
    if (n) *n = model->model.order();
    if (nu) *nu = model->model.inputs();
    if (ny) *ny = model->model.outputs();
  });
}

const char* h2w_model_name(const h2w_model* model) {
  return model ? model->name.c_str() : "";
}

h2w_status h2w_model_set_name(h2w_model* model, const char* name) {
  return guarded([&] {
    require(model != nullptr && name != nullptr, "null argument");
    model->name = name;
  });
}

void h2w_model_free(h2w_model* model) { delete model; }

h2w_status h2w_norm(const h2w_model* model, h2w_backend backend, double omega_lo,
                    double omega_hi, double tol, h2w_norm_result* out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "null argument");
    *out = to_c(norm_impl(model->model, backend, omega_lo, omega_hi, tol));
  });
}

h2w_status h2w_compare(const h2w_model* model, double omega, double tol,
                       double threshold, h2w_compare_report* out) {
  bool disagree = false;
  const h2w_status st = guarded([&] {
    require(model != nullptr && out != nullptr, "null argument");
    require(std::isfinite(omega) && omega > 0.0, "compare needs a finite omega > 0");
    *out = h2w_compare_report{};
    const StateSpaceModel& m = model->model;

    out->results[H2W_BACKEND_SPECTRAL] = to_c(norm_impl(m, H2W_BACKEND_SPECTRAL, 0.0, omega, tol));
    out->available[H2W_BACKEND_SPECTRAL] = 1;
    try {
      out->results[H2W_BACKEND_GRAMIAN] = to_c(norm_impl(m, H2W_BACKEND_GRAMIAN, 0.0, omega, tol));
      out->available[H2W_BACKEND_GRAMIAN] = 1;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kUnstable && e.code() != ErrorCode::kNotStrictlyProper) throw;
    }
    out->results[H2W_BACKEND_QUADRATURE] =
        to_c(norm_impl(m, H2W_BACKEND_QUADRATURE, 0.0, omega, tol));
    out->available[H2W_BACKEND_QUADRATURE] = 1;

    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int k = i + 1; k < 3; ++k) {
        if (out->available[i] && out->available[k]) {
          worst = std::max(worst, rel_dev(out->results[i].value_sq, out->results[k].value_sq));
        }
      }
    }
    out->max_rel_deviation = worst;
    if (worst > threshold) {
      disagree = true;
      g_last_error = "backends disagree: max relative deviation " + std::to_string(worst);
    }
  });
  if (st == H2W_OK && disagree) return H2W_ERR_DISAGREEMENT;
  return st;
}

h2w_status h2w_spectrum_create(const h2w_model* model, h2w_spectrum** out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "null argument");
    SpectralData data = spectral_decompose(model->model);
    *out = new h2w_spectrum{model->model, std::move(data)};
  });
}

size_t h2w_spectrum_size(const h2w_spectrum* spectrum) {
  return spectrum ? spectrum->data.size() : 0;
}

h2w_status h2w_spectrum_pole(const h2w_spectrum* spectrum, size_t i, double* re,
                             double* im) {
  return guarded([&] {
    require(spectrum != nullptr, "null spectrum");
    require(i < spectrum->data.size(), "pole index out of range");
    const auto l = spectrum->data.eigenvalues(static_cast<Eigen::Index>(i));
    if (re) *re = l.real();
    if (im) *im = l.imag();
  });
}

double h2w_spectrum_radius(const h2w_spectrum* spectrum) {
  return spectrum ? spectrum->data.spectral_radius : 0.0;
}

h2w_status h2w_spectrum_norm(const h2w_spectrum* spectrum, double omega_lo,
                             double omega_hi, h2w_norm_result* out) {
  return guarded([&] {
    require(spectrum != nullptr && out != nullptr, "null argument");
    check_band_args(omega_lo, omega_hi);
    const auto start = std::chrono::steady_clock::now();
    NormResult r = omega_hi == omega_lo
                       ? make_result(0.0, 0.0, Backend::kSpectral)
                       : spectral_norm(spectrum->model, spectrum->data, omega_lo, omega_hi);
    r.elapsed = std::chrono::steady_clock::now() - start;
    *out = to_c(r);
  });
}

h2w_status h2w_spectrum_limit(const h2w_spectrum* spectrum, h2w_limit_regime* regime,
                              double* value_sq) {
  return guarded([&] {
    require(spectrum != nullptr && regime != nullptr && value_sq != nullptr,
            "null argument");
    if (!spectrum->model.strictly_proper()) {
      throw Error(ErrorCode::kNotStrictlyProper,
                  "the omega -> infinity limit needs D = 0");
    }
    const auto& poles = spectrum->data.eigenvalues;
    const LimitResult lim =
        h2w_limit(spectrum->data, classify_poles(poles, default_imag_tol(poles)));
    *regime = static_cast<h2w_limit_regime>(lim.regime);
    *value_sq = lim.value_sq;
  });
}

void h2w_spectrum_free(h2w_spectrum* spectrum) { delete spectrum; }

}  // extern "C"

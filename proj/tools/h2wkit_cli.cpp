// h2wkit command-line front end. Talks to the library only through the C API.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#if defined(__linux__)
#include <sched.h>
#endif

#include "CLI11.hpp"
#include "h2wkit/h2wkit.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;

int exit_code(h2w_status st) {
  switch (st) {
    case H2W_OK: return kExitOk;
    case H2W_ERR_PARSE:
    case H2W_ERR_INVALID_ARGUMENT: return kExitUsage;
    case H2W_ERR_BAND: return 3;
    case H2W_ERR_DEGENERATE: return 4;
    case H2W_ERR_DISAGREEMENT: return 5;
    default: return 6;
  }
}

struct CliFailure {
  h2w_status status;
  std::string message;
};

void check(h2w_status st) {
  if (st != H2W_OK) throw CliFailure{st, h2w_last_error()};
}

[[noreturn]] void usage_error(const std::string& msg) {
  throw CliFailure{H2W_ERR_INVALID_ARGUMENT, msg};
}

struct ModelDeleter {
  void operator()(h2w_model* m) const { h2w_model_free(m); }
};
struct SpectrumDeleter {
  void operator()(h2w_spectrum* s) const { h2w_spectrum_free(s); }
};
using ModelPtr = std::unique_ptr<h2w_model, ModelDeleter>;
using SpectrumPtr = std::unique_ptr<h2w_spectrum, SpectrumDeleter>;

ModelPtr load(const std::string& path) {
  h2w_model* m = nullptr;
  check(h2w_model_load_file(path.c_str(), &m));
  return ModelPtr(m);
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_number(const std::string& text, const char* what) {
  if (text == "inf" || text == "Inf" || text == "INF") {
    return std::numeric_limits<double>::infinity();
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    usage_error(std::string("bad ") + what + " '" + text + "'");
  }
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, sep)) parts.push_back(item);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

// Output sink: "-" is stdout, anything else a file written after all rows
// are computed.
class Sink {
 public:
  explicit Sink(const std::string& path) : path_(path) {}
  std::ostream& stream() { return buffer_; }
  void flush() {
    if (path_.empty() || path_ == "-") {
      std::cout << buffer_.str();
      std::cout.flush();
      return;
    }
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw CliFailure{H2W_ERR_PARSE, "cannot write '" + path_ + "'"};
    out << buffer_.str();
  }

 private:
  std::string path_;
  std::ostringstream buffer_;
};

// ---- norm ---------------------------------------------------------------

struct NormArgs {
  std::string model;
  std::string omega;
  std::string band;
  std::string backend = "spectral";
  double tol = 1e-9;
};

int run_norm(const NormArgs& a) {
  if (a.omega.empty() == a.band.empty()) usage_error("give exactly one of --omega or --band");
  double lo = 0.0, hi = 0.0;
  if (!a.omega.empty()) {
    hi = parse_number(a.omega, "omega");
  } else {
    const auto parts = split(a.band, ':');
    if (parts.size() != 2) usage_error("--band expects <lo>:<hi>");
    lo = parse_number(parts[0], "band lower bound");
    hi = parse_number(parts[1], "band upper bound");
  }
  h2w_backend backend{};
  check(h2w_backend_parse(a.backend.c_str(), &backend));

  const ModelPtr model = load(a.model);
  h2w_norm_result r{};
  check(h2w_norm(model.get(), backend, lo, hi, a.tol, &r));

  std::cout << "model: " << h2w_model_name(model.get()) << '\n'
            << "backend: " << h2w_backend_name(r.backend) << '\n'
            << "band: [" << fmt(lo) << ", " << fmt(hi) << "]\n"
            << "value_sq: " << fmt(r.value_sq) << '\n'
            << "value: " << fmt(r.value) << '\n'
            << "imag_residual: " << fmt(r.imag_residual) << '\n'
            << "elapsed_s: " << fmt(r.elapsed_seconds) << '\n';
  if (!r.h2_interpretation) {
    std::cout << "note: antistable poles present, the band integral has no H2 interpretation\n";
  }
  return kExitOk;
}

// ---- compare --------------------------------------------------------------

struct CompareArgs {
  std::string model;
  double omega = 1.0;
  double tol = 1e-9;
  double threshold = 1e-6;
};

int run_compare(const CompareArgs& a) {
  const ModelPtr model = load(a.model);
  h2w_compare_report rep{};
  const h2w_status st = h2w_compare(model.get(), a.omega, a.tol, a.threshold, &rep);
  if (st != H2W_OK && st != H2W_ERR_DISAGREEMENT) check(st);

  std::cout << "backend,value_sq,value,elapsed_s\n";
  for (int b = 0; b < 3; ++b) {
    if (!rep.available[b]) continue;
    const auto& r = rep.results[b];
    std::cout << h2w_backend_name(static_cast<h2w_backend>(b)) << ',' << fmt(r.value_sq)
              << ',' << fmt(r.value) << ',' << fmt(r.elapsed_seconds) << '\n';
  }
  std::cout << "max_rel_deviation," << fmt(rep.max_rel_deviation) << ",,\n";
  if (!rep.available[H2W_BACKEND_GRAMIAN]) {
    std::cout << "# gramian omitted: needs a stable, strictly proper model\n";
  }
  if (st == H2W_ERR_DISAGREEMENT) {
    std::cerr << "error: " << h2w_last_error() << '\n';
    return exit_code(st);
  }
  return kExitOk;
}

// ---- sweep ----------------------------------------------------------------

struct SweepArgs {
  std::string model;
  std::string grid;
  std::string logspace;
  std::string backend = "spectral";
  std::string output = "-";
  double tol = 1e-9;
  bool parallel = false;
};

std::vector<double> build_grid(const SweepArgs& a) {
  std::vector<double> grid;
  if (a.grid.empty() == a.logspace.empty()) usage_error("give exactly one of --grid or --logspace");
  if (!a.grid.empty()) {
    const auto p = split(a.grid, ':');
    if (p.size() != 3) usage_error("--grid expects <lo>:<step>:<hi>");
    const double lo = parse_number(p[0], "grid start");
    const double step = parse_number(p[1], "grid step");
    const double hi = parse_number(p[2], "grid end");
    if (!(step > 0.0) || !(hi >= lo) || !std::isfinite(hi)) usage_error("invalid --grid");
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (std::size_t k = 0; k < count; ++k) grid.push_back(lo + static_cast<double>(k) * step);
  } else {
    const auto p = split(a.logspace, ':');
    if (p.size() != 3) usage_error("--logspace expects <lo>:<hi>:<count>");
    const double lo = parse_number(p[0], "logspace start");
    const double hi = parse_number(p[1], "logspace end");
    const double count = parse_number(p[2], "logspace count");
    if (!(lo > 0.0) || !(hi > lo) || !(count >= 2) || count != std::floor(count)) {
      usage_error("invalid --logspace");
    }
    const auto n = static_cast<std::size_t>(count);
    for (std::size_t k = 0; k < n; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(n - 1);
      grid.push_back(std::pow(10.0, std::log10(lo) + t * (std::log10(hi) - std::log10(lo))));
    }
  }
  if (grid.front() < 0.0) usage_error("grid frequencies must be >= 0");
  return grid;
}

int run_sweep(const SweepArgs& a) {
  const std::vector<double> grid = build_grid(a);
  h2w_backend backend{};
  check(h2w_backend_parse(a.backend.c_str(), &backend));
  const ModelPtr model = load(a.model);

  SpectrumPtr spectrum;
  if (backend == H2W_BACKEND_SPECTRAL) {
    h2w_spectrum* s = nullptr;
    check(h2w_spectrum_create(model.get(), &s));
    spectrum.reset(s);
  }

  std::vector<h2w_norm_result> rows(grid.size());
  std::vector<h2w_status> status(grid.size(), H2W_OK);
  std::vector<std::string> messages(grid.size());
  auto eval = [&](std::size_t k) {
    status[k] = spectrum ? h2w_spectrum_norm(spectrum.get(), 0.0, grid[k], &rows[k])
                         : h2w_norm(model.get(), backend, 0.0, grid[k], a.tol, &rows[k]);
    if (status[k] != H2W_OK) messages[k] = h2w_last_error();
  };

  if (a.parallel) {
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), grid.size()));
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < grid.size(); k += workers) eval(k);
      });
    }
    for (auto& t : pool) t.join();
  } else {
    for (std::size_t k = 0; k < grid.size(); ++k) eval(k);
  }

  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (status[k] != H2W_OK) {
      throw CliFailure{status[k], "omega = " + fmt(grid[k]) + ": " + messages[k]};
    }
  }

  Sink sink(a.output);
  sink.stream() << "omega,value_sq,value\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    sink.stream() << fmt(grid[k]) << ',' << fmt(rows[k].value_sq) << ','
                  << fmt(rows[k].value) << '\n';
  }
  sink.flush();
  return kExitOk;
}

// ---- bench ----------------------------------------------------------------

struct BenchArgs {
  std::string sizes = "2:200";
  int reps = 1000;
  double omega = 100.0;
  std::uint64_t seed = 1;
  std::size_t nu = 1;
  std::size_t ny = 1;
  std::string output = "-";
};

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  auto to_size = [](const std::string& s) {
    const double v = parse_number(s, "model order");
    if (!(v >= 1.0) || v != std::floor(v)) usage_error("model orders must be positive integers");
    return static_cast<std::size_t>(v);
  };
  if (text.find(':') != std::string::npos) {
    const auto p = split(text, ':');
    if (p.size() != 2) usage_error("--n expects a list a,b,c or a range lo:hi");
    const std::size_t lo = to_size(p[0]);
    const std::size_t hi = to_size(p[1]);
    if (hi < lo) usage_error("--n range is empty");
    for (std::size_t n = lo; n <= hi; ++n) out.push_back(n);
  } else {
    for (const auto& s : split(text, ',')) out.push_back(to_size(s));
  }
  if (out.empty()) usage_error("--n is empty");
  return out;
}

// Keeps the timing thread on the CPU it started on. BLAS worker threads are
// governed by the BLAS library's own settings (e.g. OPENBLAS_NUM_THREADS).
void pin_to_current_cpu() {
#if defined(__linux__)
  const int cpu = sched_getcpu();
  if (cpu < 0) return;
  cpu_set_t set;
  CPU_ZERO(&set);
  CPU_SET(cpu, &set);
  sched_setaffinity(0, sizeof(set), &set);
#endif
}

int run_bench(const BenchArgs& a) {
  if (a.reps < 1) usage_error("--reps must be >= 1");
  if (!(a.omega > 0.0) || !std::isfinite(a.omega)) usage_error("--omega must be finite and > 0");
  const std::vector<std::size_t> sizes = parse_sizes(a.sizes);
  const std::size_t warmup = std::min<std::size_t>(3, static_cast<std::size_t>(a.reps) - 1);
  pin_to_current_cpu();

  Sink sink(a.output);
  sink.stream() << "n,backend,mean_s,std_s\n";
  for (const std::size_t n : sizes) {
    h2w_model* raw = nullptr;
    check(h2w_model_random(n, a.nu, a.ny, "stable", a.seed + n, 0, &raw));
    const ModelPtr model(raw);
    for (const h2w_backend backend : {H2W_BACKEND_SPECTRAL, H2W_BACKEND_GRAMIAN}) {
      std::vector<double> times;
      for (int r = 0; r < a.reps; ++r) {
        h2w_norm_result res{};
        const auto start = std::chrono::steady_clock::now();
        check(h2w_norm(model.get(), backend, 0.0, a.omega, 0.0, &res));
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
        if (static_cast<std::size_t>(r) >= warmup) times.push_back(dt.count());
      }
      const double mean = std::accumulate(times.begin(), times.end(), 0.0) /
                          static_cast<double>(times.size());
      double var = 0.0;
      for (const double t : times) var += (t - mean) * (t - mean);
      const double sd =
          times.size() > 1 ? std::sqrt(var / static_cast<double>(times.size() - 1)) : 0.0;
      sink.stream() << n << ',' << h2w_backend_name(backend) << ',' << fmt(mean) << ','
                    << fmt(sd) << '\n';
    }
  }
  sink.flush();
  return kExitOk;
}

// ---- gen ------------------------------------------------------------------

struct GenArgs {
  std::size_t n = 4;
  std::size_t nu = 1;
  std::size_t ny = 1;
  std::string spectrum = "stable";
  std::uint64_t seed = 1;
  bool feedthrough = false;
  std::string name;
  std::string output = "-";
};

int run_gen(const GenArgs& a) {
  h2w_model* raw = nullptr;
  check(h2w_model_random(a.n, a.nu, a.ny, a.spectrum.c_str(), a.seed, a.feedthrough ? 1 : 0,
                         &raw));
  const ModelPtr model(raw);
  if (!a.name.empty()) check(h2w_model_set_name(model.get(), a.name.c_str()));
  if (a.output.empty() || a.output == "-") {
    std::size_t needed = 0;
    check(h2w_model_save_string(model.get(), nullptr, 0, &needed));
    std::string text(needed, '\0');
    check(h2w_model_save_string(model.get(), text.data(), text.size(), &needed));
    text.pop_back();
    std::cout << text;
  } else {
    check(h2w_model_save_file(model.get(), a.output.c_str()));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency-limited H2 norms of continuous-time LTI models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", h2w_version());

  NormArgs norm_args;
  auto* norm = app.add_subcommand("norm", "Squared norm over [0, omega] or a band");
  norm->add_option("model", norm_args.model, "Model file")->required();
  norm->add_option("--omega", norm_args.omega, "Upper frequency (rad/s) or 'inf'");
  norm->add_option("--band", norm_args.band, "Frequency band <lo>:<hi> (rad/s)");
  norm->add_option("--backend", norm_args.backend, "spectral | gramian | quadrature")
      ->capture_default_str();
  norm->add_option("--tol", norm_args.tol, "Quadrature tolerance")->capture_default_str();

  CompareArgs cmp_args;
  auto* cmp = app.add_subcommand("compare", "Evaluate every applicable backend and compare");
  cmp->add_option("model", cmp_args.model, "Model file")->required();
  cmp->add_option("--omega", cmp_args.omega, "Upper frequency (rad/s)")->required();
  cmp->add_option("--tol", cmp_args.tol, "Quadrature tolerance")->capture_default_str();
  cmp->add_option("--threshold", cmp_args.threshold, "Allowed relative deviation")
      ->capture_default_str();

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Norm as a function of omega, CSV output");
  sweep->add_option("model", sweep_args.model, "Model file")->required();
  sweep->add_option("--grid", sweep_args.grid, "Linear grid <lo>:<step>:<hi>");
  sweep->add_option("--logspace", sweep_args.logspace, "Log grid <lo>:<hi>:<count>");
  sweep->add_option("--backend", sweep_args.backend, "spectral | gramian | quadrature")
      ->capture_default_str();
  sweep->add_option("--tol", sweep_args.tol, "Quadrature tolerance")->capture_default_str();
  sweep->add_option("--output", sweep_args.output, "Output path or '-'")->capture_default_str();
  sweep->add_flag("--parallel", sweep_args.parallel, "Evaluate grid points on several threads");

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Time spectral vs Gramian evaluation");
  bench->add_option("--n", bench_args.sizes, "Orders: list a,b,c or range lo:hi")
      ->capture_default_str();
  bench->add_option("--reps", bench_args.reps, "Evaluations per order and backend")
      ->capture_default_str();
  bench->add_option("--omega", bench_args.omega, "Upper frequency (rad/s)")->capture_default_str();
  bench->add_option("--seed", bench_args.seed, "Base seed (model n uses seed + n)")
      ->capture_default_str();
  bench->add_option("--nu", bench_args.nu, "Inputs")->capture_default_str();
  bench->add_option("--ny", bench_args.ny, "Outputs")->capture_default_str();
  bench->add_option("--output", bench_args.output, "Output path or '-'")->capture_default_str();

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "Write a seeded random model");
  gen->add_option("--n", gen_args.n, "Order")->capture_default_str();
  gen->add_option("--nu", gen_args.nu, "Inputs")->capture_default_str();
  gen->add_option("--ny", gen_args.ny, "Outputs")->capture_default_str();
  gen->add_option("--spectrum", gen_args.spectrum,
                  "stable | antistable | mixed:<p> | lightly_damped:<zeta>")
      ->capture_default_str();
  gen->add_option("--seed", gen_args.seed, "Seed")->capture_default_str();
  gen->add_flag("--feedthrough", gen_args.feedthrough, "Draw a random D");
  gen->add_option("--name", gen_args.name, "Model name");
  gen->add_option("--output", gen_args.output, "Output path or '-'")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*norm) return run_norm(norm_args);
    if (*cmp) return run_compare(cmp_args);
    if (*sweep) return run_sweep(sweep_args);
    if (*bench) return run_bench(bench_args);
    if (*gen) return run_gen(gen_args);
  } catch (const CliFailure& f) {
    std::cerr << "error: " << h2w_status_string(f.status) << ": " << f.message << '\n';
    return exit_code(f.status);
  }
  return kExitUsage;
}

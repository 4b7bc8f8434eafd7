// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Criteria that concern the command-line tool run the real binary.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "h2wkit/complex_fn.hpp"
#include "h2wkit/error.hpp"
#include "h2wkit/gramian_norm.hpp"
#include "h2wkit/model_io.hpp"
#include "h2wkit/quadrature.hpp"
#include "h2wkit/spectral_norm.hpp"

namespace {

using namespace h2wkit;
using std::numbers::pi;
using C = std::complex<double>;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

struct Run {
  int code = -1;
  std::string out;
};

Run run_cli(const std::string& args) {
  const std::string cmd = std::string(H2WKIT_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (p == nullptr) return r;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

StateSpaceModel siso(double a, double b, double c) {
  return StateSpaceModel(Eigen::MatrixXd::Constant(1, 1, a), Eigen::MatrixXd::Constant(1, 1, b),
                         Eigen::MatrixXd::Constant(1, 1, c), Eigen::MatrixXd::Zero(1, 1));
}

StateSpaceModel oscillator() {
  Eigen::MatrixXd A(2, 2), B(2, 1), Cm(1, 2);
  A << 0, 1, -1, 0;
  B << 0, 1;
  Cm << 1, 0;
  return StateSpaceModel(A, B, Cm, Eigen::MatrixXd::Zero(1, 1));
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// ---- 1 ---------------------------------------------------------------------

void closed_form_scalar(Outcome& o) {
  const auto lag = siso(-1, 1, 1);
  const auto sd = spectral_decompose(lag);
  double worst_exact = 0.0, worst_quad = 0.0;
  for (const double w : {0.5, 1.0, 2.0}) {
    const double ref = std::atan(w) / pi;
    worst_exact = std::max({worst_exact, std::abs(h2w_spectral(sd, lag.D(), w).value_sq - ref),
                            std::abs(h2w_gramian(lag, w).value_sq - ref)});
    QuadratureOptions q;
    q.tol = 1e-9;
    worst_quad =
        std::max(worst_quad, std::abs(h2w_quadrature(lag, FrequencyBand(0, w), q).value_sq - ref));
  }
  const double h2s = std::abs(h2_spectral(sd, lag).value_sq - 0.5);
  const double h2g = std::abs(h2_gramian(lag).value_sq - 0.5);
  o.require(worst_exact <= 1e-12, "spectral/gramian within 1e-12");
  o.require(worst_quad <= 1e-9, "quadrature within 1e-9");
  o.require(std::max(h2s, h2g) <= 1e-12, "H2^2 = 0.5 within 1e-12");
  o.detail << "max|err| spectral/gramian " << worst_exact << ", quadrature " << worst_quad
           << ", H2 " << std::max(h2s, h2g);
}

// ---- 2 ---------------------------------------------------------------------

void degenerate_branch(Outcome& o) {
  const auto m = oscillator();
  const auto sd = spectral_decompose(m);
  const double v = h2w_spectral(sd, m.D(), 0.5).value_sq;
  const double w = 0.5;
  const double antiderivative =
      (w / (2.0 * (1.0 - w * w)) + 0.25 * std::log((1.0 + w) / (1.0 - w))) / pi;
  o.require(std::abs(v - 0.193531) <= 1e-5, "value 0.193531 +- 1e-5");
  o.require(std::abs(v - antiderivative) <= 1e-5, "matches antiderivative");

  // Both branches are exercised: the cross pairs sum to zero, the diagonal
  // pairs do not.
  const double thr = 1e-10 * std::max(1.0, sd.spectral_radius);
  int cross = 0, diag = 0;
  for (std::size_t i = 0; i < sd.size(); ++i)
    for (std::size_t k = 0; k < sd.size(); ++k)
      (std::abs(sd.eigenvalues(i) + sd.eigenvalues(k)) <= thr ? cross : diag)++;
  o.require(cross == 2 && diag == 2, "both a_ik branches used");

  const auto path = std::filesystem::temp_directory_path() / "h2wkit_acceptance_osc.ssm";
  save_model_file(path.string(), m, "osc");
  const Run bad = run_cli("norm " + path.string() + " --omega 1.5");
  const Run ok = run_cli("norm " + path.string() + " --omega 0.5");
  std::filesystem::remove(path);
  o.require(bad.code == 3, "omega = 1.5 exits with the band-violation code 3");
  o.require(ok.code == 0, "omega = 0.5 accepted by the CLI");
  o.detail.precision(12);
  o.detail << "value_sq " << v << " (antiderivative " << antiderivative << "), omega=1.5 exit "
           << bad.code;
}

// ---- 3 ---------------------------------------------------------------------

void oracle_triple(Outcome& o) {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> order(2, 50), io(1, 3);
  double sg = 0.0, sq = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto n = static_cast<std::size_t>(order(rng));
    const auto nu = static_cast<std::size_t>(io(rng));
    const auto ny = static_cast<std::size_t>(io(rng));
    const auto m = random_model(n, nu, ny, SpectrumSpec::stable(), 1000 + k);
    const auto sd = spectral_decompose(m);
    for (const double w : {0.1, 1.0, 10.0, 100.0}) {
      const double s = h2w_spectral(sd, m.D(), w).value_sq;
      const double g = h2w_gramian(m, w).value_sq;
      QuadratureOptions q;
      q.tol = 1e-9;
      const double qv = h2w_quadrature(m, FrequencyBand(0, w), q).value_sq;
      sg = std::max(sg, rel(s, g));
      sq = std::max(sq, rel(s, qv));
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(sg <= 1e-8, "spectral-gramian <= 1e-8");
  o.require(sq <= 1e-6, "spectral-quadrature <= 1e-6");
  o.require(secs <= 120.0, "runtime <= 2 min");
  o.detail << "400 cases, max rel dev spectral-gramian " << sg << ", spectral-quadrature " << sq
           << ", " << secs << " s";
}

// ---- 4 ---------------------------------------------------------------------

void limit_regimes(Outcome& o) {
  double worst_i = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto m = random_model(2 + k, 1 + k % 3, 1 + (k / 3) % 3, SpectrumSpec::stable(), 500 + k);
    const auto sd = spectral_decompose(m);
    const double h2 = h2_spectral(sd, m).value_sq;
    const double far = h2w_spectral(sd, m.D(), 1e4 * sd.spectral_radius).value_sq;
    worst_i = std::max(worst_i, std::abs(far - h2) / h2);
  }
  o.require(worst_i <= 1e-3, "(i) within 1e-3 of H2");

  const auto unstable = siso(1, 1, 1);
  const auto su = spectral_decompose(unstable);
  const auto lim = h2w_limit(su, classify_poles(su.eigenvalues, default_imag_tol(su.eigenvalues)));
  const auto reflected = siso(-1, 1, 1);
  const double h2_reflected = h2_spectral(spectral_decompose(reflected), reflected).value_sq;
  o.require(lim.regime == LimitRegime::kUnstable, "(ii) regime");
  o.require(std::abs(lim.value_sq - h2_reflected) <= 1e-10, "(ii) limit equals reflected H2");

  double worst_ii = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto m = random_model(2 + k, 2, 2, SpectrumSpec::mixed(0.5), 700 + k, k % 2 == 0);
    const auto sd = spectral_decompose(m);
    for (const double w : {0.1, 1.0, 10.0, 100.0}) {
      worst_ii = std::max(worst_ii, rel(h2w_spectral(sd, m.D(), w).value_sq,
                                        h2w_quadrature(m, FrequencyBand(0, w)).value_sq));
    }
  }
  o.require(worst_ii <= 1e-6, "(ii) spectral-quadrature on unstable models");

  const auto osc = oscillator();
  const auto so = spectral_decompose(osc);
  const auto li = h2w_limit(so, classify_poles(so.eigenvalues, default_imag_tol(so.eigenvalues)));
  bool rejected = false;
  try {
    h2w_spectral(so, osc.D(), 1.5);
  } catch (const h2wkit::Error& e) {
    rejected = e.code() == ErrorCode::kBandViolation;
  }
  o.require(li.regime == LimitRegime::kImaginary && std::isinf(li.value_sq), "(iii) infinite");
  o.require(rejected, "(iii) omega beyond bound rejected");
  o.detail << "(i) max rel " << worst_i << "; (ii) limit " << lim.value_sq << " vs "
           << h2_reflected << ", unstable spectral-quadrature " << worst_ii << "; (iii) "
           << to_string(li.regime) << ", omega=1.5 " << (rejected ? "rejected" : "accepted");
}

// ---- 5 ---------------------------------------------------------------------

void branch_cuts(Outcome& o) {
  constexpr auto V1 = AtanVariant::kSumOfLogs;
  constexpr auto V2 = AtanVariant::kLogOfRatio;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> box(-4.0, 4.0), seg(-6.0, -1.0);
  double off_err = 0.0, on_err = 0.0;
  int on = 0;
  auto check = [&](C z) {
    const C d = atan_principal(z, V2) - atan_principal(z, V1);
    if (z.real() == 0.0 && z.imag() < -1.0) {
      ++on;
      on_err = std::max(on_err, std::abs(d - C(pi, 0.0)));
    } else {
      off_err = std::max(off_err, std::abs(d));
    }
  };
  for (int k = 0; k < 10000; ++k) {
    C z(box(rng), box(rng));
    if (k % 3 == 1) z = C(0.0, box(rng));  // imaginary axis, both sides of +-j
    if (std::abs(std::abs(z.imag()) - 1.0) < 1e-9 && z.real() == 0.0) continue;
    check(z);
  }
  for (int k = 0; k < 1000; ++k) check(C(k % 2 ? 0.0 : -0.0, seg(rng)));
  o.require(on_err <= 1e-12, "differ by pi on the segment");
  o.require(off_err <= 1e-12, "agree elsewhere");

  const double r = 1e-12;
  const double right = acot_principal(C(r, 0), V1).real();
  const double left = acot_principal(C(-r, 0), V1).real();
  const double down = acot_principal(C(0, -r), V1).real();
  const double up_v2 = acot_principal(C(0, r), V2).real();
  const double up_v1 = acot_principal(C(0, r), V1).real();
  o.require(std::abs(right - pi / 2) <= 1e-6, "acot -> pi/2 for Re z > 0");
  o.require(std::abs(left + pi / 2) <= 1e-6, "acot -> -pi/2 for Re z < 0");
  o.require(std::abs(down - pi / 2) <= 1e-6, "acot -> pi/2 on Re z = 0, Im z < 0");
  o.require(std::abs(up_v2 - pi / 2) <= 1e-6, "acot -> pi/2 on ]0, j[ via the ratio form");
  o.detail << on << " segment points (max |d - pi| " << on_err << "), max off-segment |d| "
           << off_err << "; acot limits " << right << ", " << left << ", " << down << ", "
           << up_v2 << " (sum-of-logs form on ]0, j[ gives " << up_v1 << ")";
}

// ---- 6 ---------------------------------------------------------------------

void staircase(Outcome& o) {
  const double zeta = 0.01;
  std::vector<C> poles;
  for (const double mag : {0.1, 1.0, 10.0, 100.0})
    poles.push_back(mag * C(-zeta, std::sqrt(1.0 - zeta * zeta)));
  const auto m = model_from_poles(poles, 1, 1, 2024);

  const auto path = std::filesystem::temp_directory_path() / "h2wkit_acceptance_stairs.ssm";
  save_model_file(path.string(), m, "stairs");
  // 5 points per decade, offset by half a cell so every resonance sits mid-cell.
  const Run sweep = run_cli("sweep " + path.string() + " --logspace " +
                            std::to_string(std::pow(10.0, -1.9)) + ":" +
                            std::to_string(std::pow(10.0, 2.9)) + ":25");
  std::filesystem::remove(path);
  o.require(sweep.code == 0, "sweep ran");
  if (sweep.code != 0) return;

  const auto rows = parse_csv(sweep.out);
  std::vector<double> w, v;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    w.push_back(std::stod(rows[i][0]));
    v.push_back(std::stod(rows[i][1]));
  }
  bool monotone = true;
  for (std::size_t i = 1; i < v.size(); ++i) monotone = monotone && v[i] >= v[i - 1];
  o.require(monotone, "nondecreasing");

  const double total = v.back() - v.front();
  double resonant = 0.0, worst_cell = 0.0;
  std::size_t argmax = 0;
  for (std::size_t i = 1; i < w.size(); ++i) {
    const double inc = v[i] - v[i - 1];
    if (inc > v[argmax + 1] - v[argmax]) argmax = i - 1;
    bool holds_resonance = false;
    for (const auto& l : poles)
      holds_resonance = holds_resonance || (w[i - 1] < l.imag() && l.imag() <= w[i]);
    if (holds_resonance) resonant += inc;
    QuadratureOptions q;
    q.tol = 1e-9;
    const double quad = integrate_band(m, FrequencyBand(w[i - 1], w[i]), q).value;
    worst_cell = std::max(worst_cell, std::abs(inc - quad) / std::max(quad, 1e-300));
  }
  const double share = resonant / total;
  o.require(share >= 0.9, "resonant cells >= 90% of the increase");
  o.require(worst_cell <= 1e-5, "cells match quadrature within 1e-5");

  // The largest step sits in the cell of the pole with the largest modal
  // H2 contribution |phi|^2 / |Re l|.
  const auto sd = spectral_decompose(m);
  double best = -1.0, dominant = 0.0;
  for (std::size_t i = 0; i < sd.size(); ++i) {
    const double weight = sd.residues[i].squaredNorm() / std::abs(sd.eigenvalues(i).real());
    if (weight > best) best = weight, dominant = std::abs(sd.eigenvalues(i).imag());
  }
  o.require(w[argmax] < dominant && dominant <= w[argmax + 1], "largest step at dominant pole");
  o.detail << "resonant share " << share << ", worst cell rel dev " << worst_cell
           << ", largest step in [" << w[argmax] << ", " << w[argmax + 1] << "]";
}

// ---- 7 ---------------------------------------------------------------------

void timing(Outcome& o) {
  const Run r = run_cli("bench --n 10,50,100,200 --reps 100 --omega 100");
  o.require(r.code == 0, "bench ran");
  if (r.code != 0) return;
  const auto rows = parse_csv(r.out);
  o.require(rows.size() == 9, "8 data rows");
  double spectral = NAN, gramian = NAN;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    o.detail << rows[i][0] << "/" << rows[i][1] << " " << rows[i][2] << " s; ";
    if (rows[i][0] == "200" && rows[i][1] == "spectral") spectral = std::stod(rows[i][2]);
    if (rows[i][0] == "200" && rows[i][1] == "gramian") gramian = std::stod(rows[i][2]);
  }
  o.require(spectral < gramian, "spectral faster than gramian at n = 200");
}

// ---- 8 ---------------------------------------------------------------------

void invariant_suites(Outcome& o) {
  const std::vector<std::string> binaries = {H2WKIT_PROPERTY_BINARIES};
  int failures = 0;
  for (const auto& bin : binaries) {
    const std::string cmd = bin + " --gtest_filter='*PropertyTest.*' --gtest_brief=1 >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    const bool ok = WIFEXITED(status) && WEXITSTATUS(status) == 0;
    if (!ok) {
      ++failures;
      o.detail << "failed: " << std::filesystem::path(bin).filename().string() << "; ";
    }
  }
  o.require(failures == 0, "all property suites green");
  o.detail << binaries.size() - failures << "/" << binaries.size()
           << " property suites passed (fixed seeds)";
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<void(Outcome&)> body;
  };
  const Criterion criteria[] = {
      {"closed-form scalar exactness", closed_form_scalar},
      {"degenerate-branch correctness", degenerate_branch},
      {"oracle triple agreement", oracle_triple},
      {"limit regimes", limit_regimes},
      {"branch-cut suite", branch_cuts},
      {"staircase sweep", staircase},
      {"timing ordering", timing},
      {"invariant suites", invariant_suites},
  };
  int failed = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << index << ". " << c.name << " ("
              << secs << " s): " << o.detail.str() << std::endl;
    if (!o.pass) ++failed;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}

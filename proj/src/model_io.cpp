#include "h2wkit/model_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>

#include "h2wkit/error.hpp"

namespace h2wkit {

namespace {

constexpr const char* kMagic = "h2wkit-model";
constexpr const char* kVersion = "v1";
constexpr double kMinGap = 1e-3;

[[noreturn]] void parse_error(std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::kParse, "line " + std::to_string(line) + ": " + msg);
}

[[noreturn]] void dims_error(std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::kDimensionMismatch,
              "line " + std::to_string(line) + ": " + msg);
}

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok, std::size_t line, std::size_t field) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = first + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    parse_error(line, "field " + std::to_string(field) + ": '" + tok +
                          "' is not a number");
  }
  if (!std::isfinite(v)) {
    parse_error(line, "field " + std::to_string(field) + ": non-finite value");
  }
  return v;
}

std::size_t parse_dim(const std::string& tok, std::size_t line, const char* what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || v == 0) {
    parse_error(line, std::string("dims: ") + what + " must be a positive integer, got '" +
                          tok + "'");
  }
  return v;
}

int matrix_slot(const std::string& name) {
  if (name == "A") return 0;
  if (name == "B") return 1;
  if (name == "C") return 2;
  if (name == "D") return 3;
  return -1;
}

void write_matrix(std::ostream& out, const char* name, const Eigen::MatrixXd& m) {
  out << "matrix " << name << '\n';
  std::array<char, 32> buf{};
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf.data(), buf.size(), "%.17g", m(r, c));
      if (c > 0) out << ' ';
      out << buf.data();
    }
    out << '\n';
  }
}

// Block-diagonal real form, one 1x1 block per real pole and one
// [[a, b], [-b, a]] block per pair a +- jb.
Eigen::MatrixXd real_block_form(const std::vector<Complex>& upper, std::size_t n) {
  Eigen::MatrixXd blk = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
  Eigen::Index k = 0;
  for (const auto& l : upper) {
    if (l.imag() == 0.0) {
      blk(k, k) = l.real();
      k += 1;
    } else {
      blk(k, k) = l.real();
      blk(k + 1, k + 1) = l.real();
      blk(k, k + 1) = l.imag();
      blk(k + 1, k) = -l.imag();
      k += 2;
    }
  }
  return blk;
}

std::size_t state_count(const std::vector<Complex>& upper) {
  std::size_t n = 0;
  for (const auto& l : upper) n += l.imag() == 0.0 ? 1 : 2;
  return n;
}

StateSpaceModel assemble(const std::vector<Complex>& upper, std::size_t nu,
                         std::size_t ny, std::mt19937_64& rng, bool with_feedthrough) {
  const std::size_t n = state_count(upper);
  const auto ni = static_cast<Eigen::Index>(n);
  const auto nui = static_cast<Eigen::Index>(nu);
  const auto nyi = static_cast<Eigen::Index>(ny);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto gaussian = [&](Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = normal(rng);
    return m;
  };

  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(gaussian(ni, ni))
                                .householderQ();
  const Eigen::MatrixXd A = Q * real_block_form(upper, n) * Q.transpose();
  Eigen::MatrixXd B = gaussian(ni, nui);
  Eigen::MatrixXd C = gaussian(nyi, ni);
  Eigen::MatrixXd D = with_feedthrough ? gaussian(nyi, nui)
                                       : Eigen::MatrixXd::Zero(nyi, nui);
  return StateSpaceModel(A, std::move(B), std::move(C), std::move(D));
}

bool far_enough(const std::vector<Complex>& existing, Complex candidate) {
  const std::array<Complex, 2> probes{candidate, std::conj(candidate)};
  for (const auto& e : existing) {
    for (const auto& other : {e, std::conj(e)}) {
      for (const auto& p : probes) {
        if (std::abs(p - other) < kMinGap) return false;
      }
    }
  }
  return candidate.imag() == 0.0 || 2.0 * std::abs(candidate.imag()) >= kMinGap;
}

}  // namespace

NamedModel load_model(std::istream& in) {
  std::string raw;
  std::size_t line_no = 0;

  if (!std::getline(in, raw)) parse_error(1, "empty document");
  ++line_no;
  if (!raw.empty() && raw.back() == '\r') raw.pop_back();
  {
    const auto toks = tokenize(raw);
    if (toks.size() != 2 || toks[0] != kMagic) {
      parse_error(line_no, std::string("expected header '") + kMagic + " " + kVersion + "'");
    }
    if (toks[1] != kVersion) {
      parse_error(line_no, "unsupported format version '" + toks[1] + "'");
    }
  }

  std::string name = "unnamed";
  std::optional<std::array<std::size_t, 3>> dims;  // n, nu, ny
  std::array<std::optional<Eigen::MatrixXd>, 4> mats;
  constexpr std::array<const char*, 4> kNames{"A", "B", "C", "D"};

  // Matrix block being filled, if any.
  int slot = -1;
  Eigen::Index row = 0;
  std::size_t block_line = 0;

  auto finish_block = [&](std::size_t at_line) {
    if (slot >= 0 && row != mats[static_cast<std::size_t>(slot)]->rows()) {
      dims_error(at_line, std::string("matrix ") + kNames[static_cast<std::size_t>(slot)] +
                              " (line " + std::to_string(block_line) + ") expects " +
                              std::to_string(mats[static_cast<std::size_t>(slot)]->rows()) +
                              " rows, found " + std::to_string(row));
    }
    slot = -1;
  };

  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const auto hash = raw.find('#');
    const std::string body = hash == std::string::npos ? raw : raw.substr(0, hash);
    const auto toks = tokenize(body);
    if (toks.empty()) continue;

    const bool is_keyword = toks[0] == "name" || toks[0] == "dims" || toks[0] == "matrix";
    if (slot >= 0 && !is_keyword) {
      auto& m = *mats[static_cast<std::size_t>(slot)];
      if (row >= m.rows()) {
        dims_error(line_no, std::string("matrix ") + kNames[static_cast<std::size_t>(slot)] +
                                " has more than " + std::to_string(m.rows()) + " rows");
      }
      if (static_cast<Eigen::Index>(toks.size()) != m.cols()) {
        dims_error(line_no, std::string("matrix ") + kNames[static_cast<std::size_t>(slot)] +
                                " row " + std::to_string(row + 1) + " has " +
                                std::to_string(toks.size()) + " values, expected " +
                                std::to_string(m.cols()));
      }
      for (std::size_t c = 0; c < toks.size(); ++c) {
        m(row, static_cast<Eigen::Index>(c)) = parse_double(toks[c], line_no, c + 1);
      }
      ++row;
      continue;
    }
    finish_block(line_no);

    if (toks[0] == "name") {
      const auto pos = body.find("name") + 4;
      const auto start = body.find_first_not_of(" \t", pos);
      const auto end = body.find_last_not_of(" \t");
      name = start == std::string::npos ? "" : body.substr(start, end - start + 1);
    } else if (toks[0] == "dims") {
      if (dims) parse_error(line_no, "duplicate dims line");
      if (toks.size() != 4) parse_error(line_no, "dims needs exactly three integers");
      dims = std::array<std::size_t, 3>{parse_dim(toks[1], line_no, "n"),
                                        parse_dim(toks[2], line_no, "nu"),
                                        parse_dim(toks[3], line_no, "ny")};
    } else if (toks[0] == "matrix") {
      if (!dims) parse_error(line_no, "matrix block before dims line");
      if (toks.size() != 2 || matrix_slot(toks[1]) < 0) {
        parse_error(line_no, "expected 'matrix A|B|C|D'");
      }
      slot = matrix_slot(toks[1]);
      if (mats[static_cast<std::size_t>(slot)]) {
        parse_error(line_no, "duplicate matrix " + toks[1]);
      }
      const auto [n, nu, ny] = *dims;
      const std::array<std::array<std::size_t, 2>, 4> shapes{
          {{n, n}, {n, nu}, {ny, n}, {ny, nu}}};
      const auto& shape = shapes[static_cast<std::size_t>(slot)];
      mats[static_cast<std::size_t>(slot)] =
          Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(shape[0]),
                                static_cast<Eigen::Index>(shape[1]));
      row = 0;
      block_line = line_no;
    } else {
      parse_error(line_no, "unknown keyword '" + toks[0] + "'");
    }
  }
  finish_block(line_no);

  if (!dims) parse_error(line_no, "missing dims line");
  for (std::size_t i = 0; i < mats.size(); ++i) {
    if (!mats[i]) parse_error(line_no, std::string("missing matrix ") + kNames[i]);
  }
  return NamedModel{name, StateSpaceModel(*mats[0], *mats[1], *mats[2], *mats[3])};
}

NamedModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot open model file '" + path + "'");
  return load_model(in);
}

NamedModel load_model_string(const std::string& text) {
  std::istringstream in(text);
  return load_model(in);
}

void save_model(std::ostream& out, const StateSpaceModel& model, const std::string& name) {
  out << kMagic << ' ' << kVersion << '\n';
  out << "name " << name << '\n';
  out << "dims " << model.order() << ' ' << model.inputs() << ' ' << model.outputs() << '\n';
  write_matrix(out, "A", model.A());
  write_matrix(out, "B", model.B());
  write_matrix(out, "C", model.C());
  write_matrix(out, "D", model.D());
}

void save_model_file(const std::string& path, const StateSpaceModel& model,
                     const std::string& name) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kParse, "cannot write model file '" + path + "'");
  save_model(out, model, name);
  if (!out) throw Error(ErrorCode::kParse, "write to '" + path + "' failed");
}

std::string save_model_string(const StateSpaceModel& model, const std::string& name) {
  std::ostringstream out;
  save_model(out, model, name);
  return out.str();
}

SpectrumSpec parse_spectrum_spec(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  auto param = [&](const char* what) {
    if (colon == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string("spectrum '") + kind + "' needs a " + what + " parameter");
    }
    const std::string arg = text.substr(colon + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), v);
    if (ec != std::errc() || ptr != arg.data() + arg.size()) {
      throw Error(ErrorCode::kInvalidArgument, "bad spectrum parameter '" + arg + "'");
    }
    return v;
  };
  if (kind == "stable" && colon == std::string::npos) return SpectrumSpec::stable();
  if (kind == "antistable" && colon == std::string::npos) return SpectrumSpec::antistable();
  if (kind == "mixed") {
    const double p = param("probability");
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "mixed spectrum needs 0 <= p <= 1");
    }
    return SpectrumSpec::mixed(p);
  }
  if (kind == "lightly_damped") {
    const double zeta = param("damping");
    if (!(zeta > 0.0 && zeta < 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "lightly damped spectrum needs 0 < zeta < 1");
    }
    return SpectrumSpec::lightly_damped(zeta);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown spectrum spec '" + text + "'");
}

StateSpaceModel random_model(std::size_t n, std::size_t nu, std::size_t ny,
                             const SpectrumSpec& spectrum, std::uint64_t seed,
                             bool with_feedthrough) {
  if (n == 0 || nu == 0 || ny == 0) {
    throw Error(ErrorCode::kInvalidArgument, "random_model: dimensions must be positive");
  }
  if (spectrum.kind == SpectrumKind::kMixed &&
      !(spectrum.p_unstable >= 0.0 && spectrum.p_unstable <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "mixed spectrum needs 0 <= p <= 1");
  }
  if (spectrum.kind == SpectrumKind::kLightlyDamped &&
      !(spectrum.zeta_max > 0.0 && spectrum.zeta_max < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "lightly damped spectrum needs 0 < zeta < 1");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  auto draw = [&](bool pair) -> Complex {
    switch (spectrum.kind) {
      case SpectrumKind::kLightlyDamped: {
        const double mag = std::pow(10.0, uniform(-1.0, 2.0));
        if (!pair) return {-mag, 0.0};
        const double zeta = uniform(spectrum.zeta_max / 5.0, spectrum.zeta_max);
        return mag * Complex(-zeta, std::sqrt(1.0 - zeta * zeta));
      }
      default: {
        Complex l(-uniform(0.05, 10.0), pair ? uniform(0.1, 10.0) : 0.0);
        const bool flip =
            spectrum.kind == SpectrumKind::kAntistable ||
            (spectrum.kind == SpectrumKind::kMixed && unit(rng) < spectrum.p_unstable);
        if (flip) l = Complex(-l.real(), l.imag());
        return l;
      }
    }
  };

  std::vector<Complex> upper;
  std::size_t remaining = n;
  while (remaining > 0) {
    bool pair = false;
    if (remaining >= 2) {
      pair = spectrum.kind == SpectrumKind::kLightlyDamped || unit(rng) < 0.5;
    }
    Complex l = draw(pair);
    for (int attempt = 0; !far_enough(upper, l); ++attempt) {
      if (attempt > 10000) {
        throw Error(ErrorCode::kInvalidArgument,
                    "random_model: cannot place poles with the required separation");
      }
      l = draw(pair);
    }
    upper.push_back(l);
    remaining -= pair ? 2 : 1;
  }
  return assemble(upper, nu, ny, rng, with_feedthrough);
}

StateSpaceModel model_from_poles(const std::vector<Complex>& poles, std::size_t nu,
                                 std::size_t ny, std::uint64_t seed,
                                 bool with_feedthrough) {
  if (poles.empty() || nu == 0 || ny == 0) {
    throw Error(ErrorCode::kInvalidArgument, "model_from_poles: empty model");
  }
  for (const auto& l : poles) {
    if (l.imag() < 0.0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "model_from_poles: list only the upper member of each pair");
    }
  }
  std::mt19937_64 rng(seed);
  return assemble(poles, nu, ny, rng, with_feedthrough);
}

}  // namespace h2wkit

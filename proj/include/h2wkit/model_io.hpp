#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "h2wkit/model.hpp"

namespace h2wkit {

// Text model document:
//
//   h2wkit-model v1
//   # comment
//   name <string>
//   dims <n> <nu> <ny>
//   matrix A
//   <n rows of n values>
//   matrix B
//   ...
//
// Values are written with 17 significant digits so save -> load is exact.

struct NamedModel {
  std::string name;
  StateSpaceModel model;
};

NamedModel load_model(std::istream& in);
NamedModel load_model_file(const std::string& path);
NamedModel load_model_string(const std::string& text);

void save_model(std::ostream& out, const StateSpaceModel& model,
                const std::string& name = "unnamed");
void save_model_file(const std::string& path, const StateSpaceModel& model,
                     const std::string& name = "unnamed");
std::string save_model_string(const StateSpaceModel& model,
                              const std::string& name = "unnamed");

enum class SpectrumKind { kStable, kAntistable, kMixed, kLightlyDamped };

struct SpectrumSpec {
  SpectrumKind kind = SpectrumKind::kStable;
  double p_unstable = 0.5;  // kMixed: probability a mode is antistable
  double zeta_max = 0.05;   // kLightlyDamped: damping ratio ceiling

  static SpectrumSpec stable() { return {}; }
  static SpectrumSpec antistable() { return {SpectrumKind::kAntistable}; }
  static SpectrumSpec mixed(double p) { return {SpectrumKind::kMixed, p}; }
  static SpectrumSpec lightly_damped(double zeta) {
    return {SpectrumKind::kLightlyDamped, 0.5, zeta};
  }
};

/// Parses "stable", "antistable", "mixed:<p>", "lightly_damped:<zeta>".
SpectrumSpec parse_spectrum_spec(const std::string& text);

/// Seeded random model. Poles are drawn one mode at a time (a real pole or a
/// conjugate pair), resampling until every pairwise gap is >= 1e-3:
///   stable          Re in [-10, -0.05], Im in [0.1, 10] for pairs
///   antistable      mirror image of stable
///   mixed(p)        each mode mirrored into the right half-plane w.p. p
///   lightly_damped  pairs with damping in [zeta_max/5, zeta_max] and |l|
///                   log-uniform in [0.1, 100]
/// A is the real block-diagonal form conjugated by a random orthogonal
/// matrix; B, C (and D when requested) are standard normal.
StateSpaceModel random_model(std::size_t n, std::size_t nu, std::size_t ny,
                             const SpectrumSpec& spectrum, std::uint64_t seed,
                             bool with_feedthrough = false);

/// Builds a real model whose poles are the given values plus conjugates of
/// those with Im > 0; entries with Im < 0 are rejected. B, C, D drawn as in
/// random_model.
StateSpaceModel model_from_poles(const std::vector<Complex>& poles, std::size_t nu,
                                 std::size_t ny, std::uint64_t seed,
                                 bool with_feedthrough = false);

}  // namespace h2wkit

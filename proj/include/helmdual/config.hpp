#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "helmdual/asymptotic.hpp"
#include "helmdual/search.hpp"

namespace helmdual {

enum class CoefficientKind { PeriodicSine, Constant, Bump, File };

// periodic_sine: base + amplitude·Π_j sin(2π x_j) over the first two axes
// (ℤ^N-periodic); constant: base (periodic); bump: the bump.* descriptor
// alone (compact support); file: Q read from a field file.
struct CoefficientSpec {
  CoefficientKind kind = CoefficientKind::PeriodicSine;
  double base = 1.0;
  double amplitude = 0.5;
  std::string file;
  bool periodic = false;  // only read for kind = file
  friend bool operator==(const CoefficientSpec&, const CoefficientSpec&) = default;
};

struct FarfieldSettings {
  int n_theta = 16;
  int n_phi = 32;
  double shell_width = 3.141592653589793;
  friend bool operator==(const FarfieldSettings&, const FarfieldSettings&) = default;
};

struct RunConfig {
  std::string mode;  // solve | compare | farfield | selftest
  GridSpec grid;
  double p = 7.0;
  CoefficientSpec coefficient;
  BumpDescriptor bump;
  DescentConfig descent;
  std::uint64_t seed = 1;
  std::string output = "out";
  FarfieldSettings farfield;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Defaults for a mode; farfield uses a 3D absorbing box with a compact bump.
RunConfig default_config(const std::string& mode);

// Flat `key = value` lines, '#' starts a comment. `mode_override`, when set,
// replaces (or supplies) the mode key.
RunConfig parse_config(const std::string& text, const std::optional<std::string>& mode_override = std::nullopt);

// Every key, round-trip exact under parse_config.
std::string serialize_config(const RunConfig& cfg);

// Q for the configured coefficient on cfg.grid (kind != bump uses periodic
// sampling on the unit cell so unit shifts are exact).
Coefficient build_coefficient(const RunConfig& cfg);

}  // namespace helmdual

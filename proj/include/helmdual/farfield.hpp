#pragma once

#include <complex>
#include <vector>

#include "helmdual/functional.hpp"

namespace helmdual {

// Directions on a (cos θ, φ) product grid: cell midpoints in cos θ and φ, so
// every cell has the same area. For N = 2 only φ is used (n_theta = 1).
struct SphereSamples {
  int dimension = 3;
  int n_theta = 1;
  int n_phi = 2;
  Point3 origin{0.0, 0.0, 0.0};
  std::vector<Point3> directions;
  std::vector<std::complex<double>> values;

  std::size_t antipode(std::size_t i) const noexcept;
};

// n_phi must be even (antipodal pairs); throws InvalidArgument otherwise.
SphereSamples sphere_grid(int dimension, int n_theta, int n_phi, const Point3& origin);

// Transform of Q|u|^{p-2}u about `samples.origin`, scaled to g_u, at every
// sample direction. Uses trigonometric interpolation of the lattice DFT.
SphereSamples farfield_amplitude(const FunctionalContext& ctx, const Field& u, SphereSamples samples);

// g at an arbitrary unit direction by bilinear interpolation on the grid.
std::complex<double> interpolate_amplitude(const SphereSamples& g, const Point3& xi);

struct ShellRow {
  double r_lo = 0.0;
  double r_hi = 0.0;
  double r_mean = 0.0;
  double mean_abs_u = 0.0;
  std::size_t count = 0;
};

struct ExpansionRow {
  double R = 0.0;
  double error = 0.0;
};

struct FarfieldOptions {
  double inner_radius = 2.0;  // support radius of Q about the origin
  double shell_width = 3.141592653589793;
  double shell_offset = 1.5;  // first shell starts at inner_radius + offset
  double outer_margin = 1.0;  // last shell ends before L/2 - margin
};

struct FarfieldReport {
  bool degenerate = false;
  double target_exponent = 0.0;  // (N-1)/2
  double decay_exponent = 0.0;   // after dividing out e^{-Im κ r}
  double raw_exponent = 0.0;
  double damping = 0.0;  // Im κ, κ = sqrt(1 + iε)
  std::vector<ShellRow> shells;
  std::vector<ExpansionRow> expansion;
  bool tail_nonincreasing = false;  // over the last three radii
  bool monotone = false;            // over all radii
  bool exponent_in_window = false;  // within 20% of the target
};

FarfieldReport decay_and_expansion_check(const FunctionalContext& ctx, const Field& u, const SphereSamples& g,
                                         const FarfieldOptions& opt);

// Q (1 + 0.3 ξ) with standard normal ξ, seeded; start for compact-support runs.
Field farfield_initial_field(const FunctionalContext& ctx, std::uint64_t seed);

}  // namespace helmdual

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "helmdual/config.hpp"
#include "helmdual/functional.hpp"

namespace test {

using namespace helmdual;

inline constexpr double kPi = std::numbers::pi;

inline FunctionalContext reference_context() {
  const RunConfig cfg = default_config("solve");
  return FunctionalContext(cfg.grid, cfg.p, build_coefficient(cfg));
}

// Q ≡ 1 on the given grid.
inline FunctionalContext uniform_context(const GridSpec& g, double p) {
  Field Q(g);
  for (double& q : Q.values()) q = 1.0;
  return FunctionalContext(g, p, Coefficient::make(Q, p, false));
}

inline Field random_field(const GridSpec& g, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Field f(g);
  for (double& x : f.values()) x = nd(rng);
  return f;
}

inline double max_abs(const Field& f) {
  double m = 0.0;
  for (double x : f.values()) m = std::max(m, std::abs(x));
  return m;
}

inline Field mode(const GridSpec& g, const Point3& k, bool sine = false) {
  return Field::from_function(g, [&](const Point3& x) {
    const double ph = k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
    return sine ? std::sin(ph) : std::cos(ph);
  });
}

// Box with a lattice frequency of |k|^2 = 2 (m = (1,2)) and no frequency on
// the unit shell.
inline GridSpec two_shell_grid(int n = 16) { return GridSpec{2, 2.0 * kPi * std::sqrt(2.5), n, 0.0}; }

inline Point3 two_shell_k(const GridSpec& g) {
  const double dk = 2.0 * kPi / g.box_length;
  return {dk, 2.0 * dk, 0.0};
}

// Dense evaluation of Σ_m σ(k_m) f̂_m e^{i k_m·x} / n^N, σ from its formula.
inline Field brute_force_resolvent(const Field& f) {
  const GridSpec& g = f.grid();
  const int n = g.points_per_axis, N = g.dimension;
  const std::size_t S = g.size();
  const double dk = 2.0 * kPi / g.box_length;
  std::vector<std::complex<double>> F(S);
  std::vector<double> sigma(S);
  for (std::size_t m = 0; m < S; ++m) {
    const Index3 mi = unravel(g, m);
    double k2 = 0.0;
    for (int d = 0; d < N; ++d) k2 += std::pow(dk * (mi[d] < n / 2 ? mi[d] : mi[d] - n), 2);
    const double dd = k2 - 1.0, e = g.shell_epsilon;
    sigma[m] = dd / (dd * dd + e * e);
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t y = 0; y < S; ++y) {
      const Index3 yi = unravel(g, y);
      int ph = 0;
      for (int d = 0; d < N; ++d) ph += mi[d] * yi[d];
      acc += f[y] * std::polar(1.0, -2.0 * kPi * (ph % n) / n);
    }
    F[m] = acc;
  }
  Field out(g);
  for (std::size_t x = 0; x < S; ++x) {
    const Index3 xi = unravel(g, x);
    double acc = 0.0;
    for (std::size_t m = 0; m < S; ++m) {
      const Index3 mi = unravel(g, m);
      int ph = 0;
      for (int d = 0; d < N; ++d) ph += mi[d] * xi[d];
      acc += sigma[m] * (F[m] * std::polar(1.0, 2.0 * kPi * (ph % n) / n)).real();
    }
    out[x] = acc / static_cast<double>(S);
  }
  return out;
}

// Composite Simpson rule on [a, b] with `intervals` (even) subintervals.
template <class F>
double simpson(F&& f, double a, double b, int intervals) {
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace test

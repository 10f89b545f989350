#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "helmdual/grid.hpp"

namespace helmdual {

// Lattice frequencies closer than this to the unit shell are treated as
// resonant when ε = 0.
inline constexpr double kShellResonanceTolerance = 1e-6;

// min over lattice frequencies of | |k|^2 - 1 |.
double shell_gap(const GridSpec& grid);

// σ(k) = (|k|^2 - 1) / ((|k|^2 - 1)^2 + ε^2) over the full lattice, FFT index
// order, row-major. Throws ShellResonance when ε = 0 and the shell is hit.
std::vector<double> helmholtz_multiplier(const GridSpec& grid);

// Fourier-multiplier operators on one grid. Plans are built once and only
// executed afterwards, so a single instance may be shared between threads.
class Resolvent {
 public:
  explicit Resolvent(const GridSpec& grid);
  ~Resolvent();
  Resolvent(const Resolvent&) = delete;
  Resolvent& operator=(const Resolvent&) = delete;

  const GridSpec& grid() const noexcept { return grid_; }
  double shell_gap() const noexcept { return shell_gap_; }

  Field apply(const Field& f) const;      // R f
  Field laplacian(const Field& u) const;  // Δ u, symbol -|k|^2
  Field helmholtz(const Field& u) const;  // (-Δ - 1) u

  // Unnormalised forward DFT Σ_x f(x) e^{-2πi m·x/n}, full lattice, FFT order.
  std::vector<std::complex<double>> spectrum(const Field& f) const;

  // Half-spectrum symbol (last axis n/2+1) used by apply().
  const std::vector<double>& half_symbol() const noexcept { return sigma_half_; }

 private:
  Field filter(const Field& f, const std::vector<double>& half) const;

  struct Plans;
  GridSpec grid_;
  double shell_gap_ = 0.0;
  std::vector<double> sigma_half_;
  std::vector<double> lap_half_;
  std::vector<double> helm_half_;
  std::unique_ptr<Plans> plans_;
};

Field resolvent_apply(const Field& f);
Field spectral_laplacian(const Field& u);

// Real part Ψ of the outgoing fundamental solution of -Δ - 1 in R^N.
// N = 3: cos r / (4π r); N = 2: -Y0(r)/4. Throws DomainError for r <= 0.
double fundamental_solution_psi(double r, int N);

}  // namespace helmdual

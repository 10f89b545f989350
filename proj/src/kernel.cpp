#include "helmdual/kernel.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <string>

#include "helmdual/error.hpp"

namespace helmdual {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Visits every stored frequency of a half (r2c) or full spectrum with |k|^2.
template <class F>
void for_each_frequency(const GridSpec& g, bool half, F&& fn) {
  const int n = g.points_per_axis;
  const int last = half ? n / 2 + 1 : n;
  const double dk = 2.0 * std::numbers::pi / g.box_length;
  std::size_t pos = 0;
  if (g.dimension == 2) {
    for (int a = 0; a < n; ++a) {
      const double ka = dk * signed_frequency(a, n);
      for (int b = 0; b < last; ++b) {
        const double kb = dk * (half ? b : signed_frequency(b, n));
        fn(pos++, ka * ka + kb * kb);
      }
    }
  } else {
    for (int a = 0; a < n; ++a) {
      const double ka = dk * signed_frequency(a, n);
      for (int b = 0; b < n; ++b) {
        const double kb = dk * signed_frequency(b, n);
        for (int c = 0; c < last; ++c) {
          const double kc = dk * (half ? c : signed_frequency(c, n));
          fn(pos++, ka * ka + kb * kb + kc * kc);
        }
      }
    }
  }
}

std::size_t half_size(const GridSpec& g) {
  std::size_t s = static_cast<std::size_t>(g.points_per_axis / 2 + 1);
  for (int d = 1; d < g.dimension; ++d) s *= static_cast<std::size_t>(g.points_per_axis);
  return s;
}

double sigma_of(double k2, double eps) {
  const double d = k2 - 1.0;
  if (eps == 0.0) return 1.0 / d;
  return d / (d * d + eps * eps);
}

void check_resonance(const GridSpec& g, double gap) {
  if (g.shell_epsilon == 0.0 && gap < kShellResonanceTolerance)
    throw Error(ErrorKind::ShellResonance,
                "lattice frequency within " + std::to_string(gap) + " of the unit shell (L = " +
                    std::to_string(g.box_length) + "); choose another box length or set epsilon > 0");
}

}  // namespace

double shell_gap(const GridSpec& grid) {
  grid.validate();
  double gap = INFINITY;
  for_each_frequency(grid, true, [&](std::size_t, double k2) { gap = std::min(gap, std::abs(k2 - 1.0)); });
  return gap;
}

std::vector<double> helmholtz_multiplier(const GridSpec& grid) {
  const double gap = shell_gap(grid);
  check_resonance(grid, gap);
  std::vector<double> out(grid.size());
  for_each_frequency(grid, false, [&](std::size_t i, double k2) { out[i] = sigma_of(k2, grid.shell_epsilon); });
  return out;
}

struct Resolvent::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

Resolvent::Resolvent(const GridSpec& grid) : grid_(grid), plans_(std::make_unique<Plans>()) {
  shell_gap_ = helmdual::shell_gap(grid_);
  check_resonance(grid_, shell_gap_);
  const std::size_t hs = half_size(grid_);
  sigma_half_.resize(hs);
  lap_half_.resize(hs);
  helm_half_.resize(hs);
  const double norm = 1.0 / static_cast<double>(grid_.size());
  for_each_frequency(grid_, true, [&](std::size_t i, double k2) {
    sigma_half_[i] = sigma_of(k2, grid_.shell_epsilon) * norm;
    lap_half_[i] = -k2 * norm;
    helm_half_[i] = (k2 - 1.0) * norm;
  });

  int dims[3] = {grid_.points_per_axis, grid_.points_per_axis, grid_.points_per_axis};
  double* in = fftw_alloc_real(grid_.size());
  fftw_complex* out = fftw_alloc_complex(hs);
  {
    std::lock_guard lock(planner_mutex());
    plans_->forward = fftw_plan_dft_r2c(grid_.dimension, dims, in, out, FFTW_ESTIMATE);
    plans_->backward = fftw_plan_dft_c2r(grid_.dimension, dims, out, in, FFTW_ESTIMATE);
  }
  fftw_free(in);
  fftw_free(out);
}

Resolvent::~Resolvent() {
  std::lock_guard lock(planner_mutex());
  if (plans_->forward) fftw_destroy_plan(plans_->forward);
  if (plans_->backward) fftw_destroy_plan(plans_->backward);
}

Field Resolvent::filter(const Field& f, const std::vector<double>& half) const {
  require_same_grid(grid_, f.grid());
  const std::size_t n = grid_.size();
  const std::size_t hs = half.size();
  double* buf = fftw_alloc_real(n);
  fftw_complex* spec = fftw_alloc_complex(hs);
  std::memcpy(buf, f.values().data(), n * sizeof(double));
  fftw_execute_dft_r2c(plans_->forward, buf, spec);
  for (std::size_t i = 0; i < hs; ++i) {
    spec[i][0] *= half[i];
    spec[i][1] *= half[i];
  }
  fftw_execute_dft_c2r(plans_->backward, spec, buf);
  Field out(grid_);
  std::memcpy(out.values().data(), buf, n * sizeof(double));
  fftw_free(buf);
  fftw_free(spec);
  return out;
}

Field Resolvent::apply(const Field& f) const { return filter(f, sigma_half_); }
Field Resolvent::laplacian(const Field& u) const { return filter(u, lap_half_); }
Field Resolvent::helmholtz(const Field& u) const { return filter(u, helm_half_); }

std::vector<std::complex<double>> Resolvent::spectrum(const Field& f) const {
  require_same_grid(grid_, f.grid());
  const std::size_t n = grid_.size();
  const std::size_t hs = half_size(grid_);
  double* buf = fftw_alloc_real(n);
  fftw_complex* spec = fftw_alloc_complex(hs);
  std::memcpy(buf, f.values().data(), n * sizeof(double));
  fftw_execute_dft_r2c(plans_->forward, buf, spec);

  const int np = grid_.points_per_axis;
  const int hl = np / 2 + 1;
  std::vector<std::complex<double>> full(n);
  for (std::size_t i = 0; i < n; ++i) {
    Index3 m = unravel(grid_, i);
    const int last = grid_.dimension - 1;
    bool conj = false;
    if (m[last] >= hl) {
      conj = true;
      for (int d = 0; d < grid_.dimension; ++d) m[d] = (np - m[d]) % np;
    }
    std::size_t hp = 0;
    for (int d = 0; d < last; ++d) hp = hp * np + m[d];
    hp = hp * hl + m[last];
    std::complex<double> c(spec[hp][0], spec[hp][1]);
    full[i] = conj ? std::conj(c) : c;
  }
  fftw_free(buf);
  fftw_free(spec);
  return full;
}

Field resolvent_apply(const Field& f) { return Resolvent(f.grid()).apply(f); }

Field spectral_laplacian(const Field& u) { return Resolvent(u.grid()).laplacian(u); }

double fundamental_solution_psi(double r, int N) {
  if (!(r > 0.0) || !std::isfinite(r))
    throw Error(ErrorKind::DomainError, "fundamental solution needs r > 0, got " + std::to_string(r));
  if (N == 3) return std::cos(r) / (4.0 * std::numbers::pi * r);
  if (N == 2) return -0.25 * std::cyl_neumann(0.0, r);
  throw Error(ErrorKind::InvalidArgument, "dimension must be 2 or 3, got " + std::to_string(N));
}

}  // namespace helmdual

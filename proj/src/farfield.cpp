#include "helmdual/farfield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "helmdual/error.hpp"

namespace helmdual {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// ∫_0^L e^{iΔx} dx
cd box_integral(double delta, double L) {
  const double th = 0.5 * delta * L;
  const double sinc = std::abs(th) < 1e-8 ? 1.0 - th * th / 6.0 : std::sin(th) / th;
  return L * sinc * std::polar(1.0, th);
}

double distance(const Point3& x, const Point3& o, int N) {
  double r2 = 0.0;
  for (int d = 0; d < N; ++d) r2 += (x[d] - o[d]) * (x[d] - o[d]);
  return std::sqrt(r2);
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

std::size_t SphereSamples::antipode(std::size_t i) const noexcept {
  const std::size_t t = i / n_phi, j = i % n_phi;
  const std::size_t ta = n_theta - 1 - t, ja = (j + n_phi / 2) % n_phi;
  return ta * n_phi + ja;
}

SphereSamples sphere_grid(int dimension, int n_theta, int n_phi, const Point3& origin) {
  if (dimension != 2 && dimension != 3) throw Error(ErrorKind::InvalidArgument, "dimension must be 2 or 3");
  if (dimension == 2) n_theta = 1;
  if (n_theta < 1 || n_phi < 2 || n_phi % 2 != 0)
    throw Error(ErrorKind::InvalidArgument, "sphere grid needs n_theta >= 1 and even n_phi >= 2");
  SphereSamples s;
  s.dimension = dimension;
  s.n_theta = n_theta;
  s.n_phi = n_phi;
  s.origin = origin;
  for (int t = 0; t < n_theta; ++t) {
    const double z = dimension == 3 ? 1.0 - (2.0 * t + 1.0) / n_theta : 0.0;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    for (int j = 0; j < n_phi; ++j) {
      const double phi = 2.0 * kPi * (j + 0.5) / n_phi;
      s.directions.push_back({rho * std::cos(phi), rho * std::sin(phi), z});
    }
  }
  s.values.assign(s.directions.size(), cd(0.0, 0.0));
  return s;
}

SphereSamples farfield_amplitude(const FunctionalContext& ctx, const Field& u, SphereSamples samples) {
  const GridSpec& g = ctx.grid();
  require_same_grid(g, u.grid());
  const int N = g.dimension, n = g.points_per_axis;
  const double L = g.box_length;
  if (samples.dimension != N) throw Error(ErrorKind::InvalidArgument, "sphere samples have the wrong dimension");
  if (kPi * n / L < 2.0 || 2.0 * kPi / L > 0.5)
    throw Error(ErrorKind::InterpolationDegenerate,
                "grid cannot resolve |k| = 1 (Nyquist " + std::to_string(kPi * n / L) + ", spacing " +
                    std::to_string(2.0 * kPi / L) + ")");

  Field f = signed_power(u, ctx.exponents().p);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] *= ctx.coefficient().Q[i];
  samples.values.assign(samples.directions.size(), cd(0.0, 0.0));
  if (f.is_zero()) return samples;

  const auto F = ctx.resolvent().spectrum(f);
  const double dk = 2.0 * kPi / L;
  const double scale = std::pow(2.0 * kPi, -0.5 * N) / static_cast<double>(g.size());
  const cd prefactor = cd(0.0, -0.25) * std::pow(2.0 * kPi, -0.5 * (N - 2));

  std::vector<std::vector<cd>> D(N, std::vector<cd>(n));
  for (std::size_t s = 0; s < samples.directions.size(); ++s) {
    const Point3& xi = samples.directions[s];
    for (int d = 0; d < N; ++d)
      for (int j = 0; j < n; ++j) {
        const int m = signed_frequency(j, n);
        if (m == -n / 2)
          D[d][j] = 0.5 * (box_integral(dk * m - xi[d], L) + box_integral(-dk * m - xi[d], L));
        else
          D[d][j] = box_integral(dk * m - xi[d], L);
      }
    cd total(0.0, 0.0);
    std::size_t pos = 0;
    if (N == 2) {
      for (int a = 0; a < n; ++a) {
        cd row(0.0, 0.0);
        for (int b = 0; b < n; ++b) row += F[pos++] * D[1][b];
        total += D[0][a] * row;
      }
    } else {
      for (int a = 0; a < n; ++a) {
        cd plane(0.0, 0.0);
        for (int b = 0; b < n; ++b) {
          cd row(0.0, 0.0);
          for (int c = 0; c < n; ++c) row += F[pos++] * D[2][c];
          plane += D[1][b] * row;
        }
        total += D[0][a] * plane;
      }
    }
    double phase = 0.0;
    for (int d = 0; d < N; ++d) phase += xi[d] * samples.origin[d];
    samples.values[s] = prefactor * scale * total * std::polar(1.0, phase);
  }
  return samples;
}

std::complex<double> interpolate_amplitude(const SphereSamples& g, const Point3& xi) {
  double phi = std::atan2(xi[1], xi[0]);
  if (phi < 0.0) phi += 2.0 * kPi;
  double fj = phi * g.n_phi / (2.0 * kPi) - 0.5;
  const double j0f = std::floor(fj);
  const double tj = fj - j0f;
  const int j0 = ((static_cast<int>(j0f) % g.n_phi) + g.n_phi) % g.n_phi;
  const int j1 = (j0 + 1) % g.n_phi;

  int i0 = 0, i1 = 0;
  double ti = 0.0;
  if (g.dimension == 3 && g.n_theta > 1) {
    double fi = (1.0 - xi[2]) * g.n_theta / 2.0 - 0.5;
    fi = std::clamp(fi, 0.0, static_cast<double>(g.n_theta - 1));
    i0 = std::min(static_cast<int>(std::floor(fi)), g.n_theta - 2);
    ti = fi - i0;
    i1 = i0 + 1;
  }
  auto at = [&](int i, int j) { return g.values[static_cast<std::size_t>(i) * g.n_phi + j]; };
  return (1.0 - ti) * ((1.0 - tj) * at(i0, j0) + tj * at(i0, j1)) + ti * ((1.0 - tj) * at(i1, j0) + tj * at(i1, j1));
}

FarfieldReport decay_and_expansion_check(const FunctionalContext& ctx, const Field& u, const SphereSamples& g,
                                         const FarfieldOptions& opt) {
  const GridSpec& grid = ctx.grid();
  require_same_grid(grid, u.grid());
  const int N = grid.dimension;
  FarfieldReport rep;
  rep.target_exponent = 0.5 * (N - 1);
  const cd kappa = std::sqrt(cd(1.0, grid.shell_epsilon));
  rep.damping = kappa.imag();
  if (u.is_zero()) {
    rep.degenerate = true;
    return rep;
  }

  const double start = opt.inner_radius + opt.shell_offset;
  const double outer = 0.5 * grid.box_length - opt.outer_margin;
  std::vector<double> edges;
  for (double e = start; e <= outer; e += opt.shell_width) edges.push_back(e);
  if (edges.size() < 4)
    throw Error(ErrorKind::InsufficientShells,
                "only " + std::to_string(edges.size() > 0 ? edges.size() - 1 : 0) + " shells fit between r = " +
                    std::to_string(start) + " and " + std::to_string(outer));

  const std::size_t ns = edges.size() - 1;
  rep.shells.resize(ns);
  for (std::size_t k = 0; k < ns; ++k) {
    rep.shells[k].r_lo = edges[k];
    rep.shells[k].r_hi = edges[k + 1];
  }
  std::vector<double> err2(u.size(), 0.0), radius(u.size());
  std::vector<double> rsum(ns, 0.0), usum(ns, 0.0);
  const double amp_power = 0.5 * (N - 1);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Point3 x = coordinates(grid, i);
    const double r = distance(x, g.origin, N);
    radius[i] = r;
    double U = 0.0;
    if (r >= opt.inner_radius && r > 0.0) {
      Point3 xi{0.0, 0.0, 0.0};
      for (int d = 0; d < N; ++d) xi[d] = (x[d] - g.origin[d]) / r;
      const cd amp = interpolate_amplitude(g, xi);
      const cd phase = std::exp(cd(0.0, 1.0) * kappa * r - cd(0.0, amp_power * 0.5 * kPi));
      U = -2.0 * std::pow(2.0 * kPi / r, amp_power) * (phase * amp).real();
    }
    err2[i] = (u[i] - U) * (u[i] - U);
    if (r >= edges.front() && r < edges.back()) {
      const auto k = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), r) - edges.begin()) - 1;
      rsum[k] += r;
      usum[k] += std::abs(u[i]);
      rep.shells[k].count++;
    }
  }

  std::vector<double> logr, logu_raw, logu_comp;
  for (std::size_t k = 0; k < ns; ++k) {
    ShellRow& s = rep.shells[k];
    if (s.count == 0) continue;
    s.r_mean = rsum[k] / s.count;
    s.mean_abs_u = usum[k] / s.count;
    if (s.mean_abs_u <= 0.0) continue;
    logr.push_back(std::log(s.r_mean));
    logu_raw.push_back(std::log(s.mean_abs_u));
    logu_comp.push_back(std::log(s.mean_abs_u) + rep.damping * s.r_mean);
  }
  if (logr.size() < 3) throw Error(ErrorKind::InsufficientShells, "fewer than 3 populated shells");
  rep.raw_exponent = -fit_slope(logr, logu_raw);
  rep.decay_exponent = -fit_slope(logr, logu_comp);
  rep.exponent_in_window =
      rep.decay_exponent >= 0.8 * rep.target_exponent && rep.decay_exponent <= 1.2 * rep.target_exponent;

  const double w = grid.cell_volume();
  for (std::size_t k = 1; k < edges.size(); ++k) {
    const double R = edges[k];
    std::vector<double> inside;
    inside.reserve(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
      if (radius[i] < R) inside.push_back(err2[i]);
    rep.expansion.push_back({R, w * pairwise_sum(inside) / R});
  }
  rep.monotone = true;
  for (std::size_t k = 1; k < rep.expansion.size(); ++k)
    if (rep.expansion[k].error > rep.expansion[k - 1].error) rep.monotone = false;
  const std::size_t m = rep.expansion.size();
  rep.tail_nonincreasing = m >= 3 && rep.expansion[m - 2].error <= rep.expansion[m - 3].error &&
                           rep.expansion[m - 1].error <= rep.expansion[m - 2].error;
  return rep;
}

Field farfield_initial_field(const FunctionalContext& ctx, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  Field v(ctx.grid());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = ctx.coefficient().Q[i] * (1.0 + 0.3 * noise(rng));
  return v;
}

}  // namespace helmdual

// One line per acceptance criterion; exit status 0 iff every line is PASS.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "helmdual/asymptotic.hpp"
#include "helmdual/config.hpp"
#include "helmdual/error.hpp"
#include "helmdual/farfield.hpp"

using namespace helmdual;
namespace fs = std::filesystem;
using cd = std::complex<double>;
using Clock = std::chrono::steady_clock;
constexpr double kPi = std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

FunctionalContext reference() {
  const RunConfig cfg = default_config("solve");
  return FunctionalContext(cfg.grid, cfg.p, build_coefficient(cfg));
}

Field gaussian_field(const GridSpec& g, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Field f(g);
  for (double& x : f.values()) x = nd(rng);
  return f;
}

double max_abs(const Field& f) {
  double m = 0.0;
  for (double x : f.values()) m = std::max(m, std::abs(x));
  return m;
}

double l2(const Field& f) {
  double s = 0.0;
  for (double x : f.values()) s += x * x;
  return std::sqrt(s * f.grid().cell_volume());
}

// Symbol of R written out directly.
double sigma_of(double k2, double eps) {
  const double d = k2 - 1.0;
  return d / (d * d + eps * eps);
}

// Spectral Laplacian by separable dense DFTs along each axis (no FFT).
Field dense_laplacian(const Field& f) {
  const GridSpec& g = f.grid();
  const int n = g.points_per_axis, N = g.dimension;
  const double dk = 2.0 * kPi / g.box_length;
  std::vector<cd> w(n);
  for (int j = 0; j < n; ++j) w[j] = std::polar(1.0, -2.0 * kPi * j / n);
  std::vector<cd> a(f.values().begin(), f.values().end()), tmp(n);
  std::size_t stride = 1;
  std::vector<std::size_t> strides(N);
  for (int d = N - 1; d >= 0; --d) strides[d] = stride, stride *= n;
  auto transform = [&](bool inverse) {
    for (int d = 0; d < N; ++d) {
      const std::size_t s = strides[d];
      for (std::size_t base = 0; base < a.size(); ++base) {
        if ((base / s) % n != 0) continue;
        for (int m = 0; m < n; ++m) {
          cd acc(0.0, 0.0);
          for (int j = 0; j < n; ++j) {
            const cd e = w[(static_cast<long>(m) * j) % n];
            acc += a[base + j * s] * (inverse ? std::conj(e) : e);
          }
          tmp[m] = acc;
        }
        for (int m = 0; m < n; ++m) a[base + m * s] = inverse ? tmp[m] / static_cast<double>(n) : tmp[m];
      }
    }
  };
  transform(false);
  for (std::size_t i = 0; i < a.size(); ++i) {
    double k2 = 0.0;
    std::size_t r = i;
    for (int d = N - 1; d >= 0; --d) {
      const int m = static_cast<int>(r % n);
      r /= n;
      if (m == n / 2) k2 = INFINITY;  // Nyquist: removed below
      const double k = dk * (m < n / 2 ? m : m - n);
      k2 += k * k;
    }
    a[i] = std::isinf(k2) ? cd(0.0, 0.0) : a[i] * (-k2);
  }
  transform(true);
  Field out(g);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i].real();
  return out;
}

// Minimum over whole-period shifts and signs, by explicit enumeration.
double brute_orbit_distance(const FunctionalContext& ctx, const Field& v, const Field& w) {
  const GridSpec& g = ctx.grid();
  const double pc = ctx.exponents().p_conj;
  const int step = static_cast<int>(g.points_per_axis / g.box_length);
  const int periods = static_cast<int>(g.box_length);
  double best = INFINITY;
  for (int a = 0; a < periods; ++a)
    for (int b = 0; b < periods; ++b) {
      const Field s = shifted(w, {a * step, b * step, 0});
      best = std::min({best, lp_norm(v - s, pc), lp_norm(v + s, pc)});
    }
  return best;
}

Outcome operator_exactness() {
  const GridSpec g{2, 6.0, 32, 0.0};
  const Resolvent R(g);
  const int n = g.points_per_axis;
  const double dk = 2.0 * kPi / g.box_length;
  // cos(2πr/n) with the exact symmetries of the circle, so that rounding in the
  // samples does not alias into other modes.
  auto base = [n](int s) { return s <= n / 8 ? std::cos(2 * kPi * s / n) : std::sin(2 * kPi * (n / 4 - s) / n); };
  auto cosr = [&](int r) {
    r = ((r % n) + n) % n;
    if (r <= n / 4) return base(r);
    if (r <= n / 2) return -base(n / 2 - r);
    if (r <= 3 * n / 4) return -base(r - n / 2);
    return base(n - r);
  };
  double worst = 0.0, worst_id = 0.0;
  int modes = 0;
  for (int m1 = -n / 2; m1 < n / 2; ++m1)
    for (int m2 = -n / 2; m2 < n / 2; ++m2)
      for (int kind = 0; kind < 2; ++kind) {
        Field f(g);
        for (std::size_t i = 0; i < f.size(); ++i) {
          const Index3 j = unravel(g, i);
          const int r = m1 * j[0] + m2 * j[1];
          f[i] = kind == 0 ? cosr(r) : cosr(r - n / 4);
        }
        if (max_abs(f) < 1e-8) continue;
        ++modes;
        const double k2 = dk * dk * (m1 * m1 + m2 * m2);
        const Field expect = f * sigma_of(k2, 0.0);
        worst = std::max(worst, l2(R.apply(f) - expect) / l2(expect));
      }
  std::mt19937_64 rng(1);
  for (int t = 0; t < 5; ++t) {
    const Field f = gaussian_field(g, rng);
    worst_id = std::max(worst_id, l2(R.helmholtz(R.apply(f)) - f) / l2(f));
  }
  return {worst <= 1e-13 && worst_id <= 1e-12,
          fmt("%.0f lattice modes, max rel err %.2e; (-lap-1)Rf = f rel err %.2e", modes, worst, worst_id)};
}

Outcome k_symmetry() {
  const auto ctx = reference();
  std::mt19937_64 rng(2);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Field v = gaussian_field(ctx.grid(), rng), w = gaussian_field(ctx.grid(), rng);
    worst = std::max(worst, std::abs(inner(v, apply_K(ctx, w)) - inner(w, apply_K(ctx, v))) / (l2(v) * l2(w)));
  }
  return {worst <= 1e-11, fmt("20 pairs, max rel asymmetry %.2e", worst)};
}

Outcome gradient_check() {
  const auto ctx = reference();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    Field v(ctx.grid());
    for (double& x : v.values()) x = (0.1 + ud(rng)) * (ud(rng) < 0.5 ? -1.0 : 1.0);
    const Field g = gradient(ctx, v);
    const Field w = gaussian_field(ctx.grid(), rng) * (1.0 / std::sqrt(static_cast<double>(v.size())));
    const double h = 1e-5;
    const double fd = (energy(ctx, v + w * h) - energy(ctx, v - w * h)) / (2 * h);
    worst = std::max(worst, std::abs(fd - inner(g, w)) / std::abs(inner(g, w)));
  }
  return {worst <= 1e-5, fmt("10 fields, max central-difference rel err %.2e", worst)};
}

Outcome fibering() {
  const auto ctx = reference();
  double slack = INFINITY, scale = 0.0;
  for (int i = 0; i < 10; ++i) {
    const Field v = random_initial_field(ctx, 4000 + i);
    const double t = fibering_scale(ctx, v);
    const double top = energy(ctx, v * t);
    std::mt19937_64 rng(40 + i);
    std::uniform_real_distribution<double> ud(-2.0, 2.0);
    for (int k = 0; k < 50; ++k) slack = std::min(slack, top - energy(ctx, v * (t * std::pow(10.0, ud(rng)))));
    const double e = nehari_energy(ctx, v);
    for (double s : {1e-3, 0.5, 7.0, 1e3}) scale = std::max(scale, std::abs(nehari_energy(ctx, v * s) - e) / e);
  }
  return {slack >= -1e-12 && scale <= 1e-12, fmt("min slack %.2e, nehari scale rel err %.2e", slack, scale)};
}

Outcome reverse_holder() {
  const auto ctx = reference();
  const double pc = ctx.exponents().p_conj;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  double s1 = INFINITY, s2 = INFINITY;
  for (int i = 0; i < 100000; ++i) {
    const double a = std::pow(10.0, -6.0 * ud(rng)), b = std::pow(10.0, -6.0 * ud(rng));
    const double lhs = (std::pow(a, pc - 1) - std::pow(b, pc - 1)) * (a - b);
    s1 = std::min(s1, lhs - (pc - 1) * (a - b) * (a - b) * std::pow(a + b, pc - 2));
  }
  for (int i = 0; i < 100; ++i) {
    const Field v = gaussian_field(ctx.grid(), rng), w = gaussian_field(ctx.grid(), rng) * (0.5 + ud(rng));
    const double lhs = inner(signed_power(v, pc) - signed_power(w, pc), v - w);
    Field sum(ctx.grid());
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = std::abs(v[k]) + std::abs(w[k]);
    const double d = lp_norm(v - w, pc);
    s2 = std::min(s2, (lhs - (pc - 1) * d * d * std::pow(lp_norm(sum, pc), pc - 2)) / lhs);
  }
  return {s1 >= -1e-12 && s2 >= -1e-12, fmt("scalar min slack %.2e (1e5 pairs), field min rel slack %.2e (100 pairs)", s1, s2)};
}

struct SolverOutcomes {
  Outcome run, primal, ps;
  double seconds = 0.0;
};

SolverOutcomes solver() {
  const auto t0 = Clock::now();
  SolverOutcomes out;
  const auto ctx = reference();
  DescentConfig cfg;
  cfg.keep_trajectory = true;
  const MultistartResult res = multistart_search(ctx, cfg);
  out.seconds = std::chrono::duration<double>(Clock::now() - t0).count();

  int converged = 0;
  double worst_res = 0.0, min_level = INFINITY, rise = -INFINITY;
  for (const StartResult& s : res.starts) {
    converged += s.status == DescentStatus::Converged;
    worst_res = std::max(worst_res, s.dual_residual);
    min_level = std::min(min_level, s.level);
    for (std::size_t k = 1; k < s.energies.size(); ++k) rise = std::max(rise, s.energies[k] - s.energies[k - 1]);
  }
  // Geometric distinctness re-established by enumeration.
  const double pc = ctx.exponents().p_conj;
  std::vector<const Field*> reps;
  for (const SolutionRecord& r : res.converged) {
    bool fresh = true;
    for (const Field* q : reps)
      if (brute_orbit_distance(ctx, r.v_star, *q) <= 1e-2 * std::max(lp_norm(r.v_star, pc), lp_norm(*q, pc)))
        fresh = false;
    if (fresh) reps.push_back(&r.v_star);
  }
  out.run.pass = converged == 20 && worst_res <= 1e-8 && min_level > 0.0 && rise <= 1e-12 && reps.size() >= 2 &&
                 out.seconds < 300.0;
  out.run.detail = fmt("%.0f/20 converged, max dual residual %.2e, min level %.8f, max J rise %.1e", converged,
                       worst_res, min_level, rise) +
                   fmt(", %.0f distinct pairs, %.1f s", static_cast<double>(reps.size()), out.seconds);

  double worst_primal = 0.0;
  for (const SolutionRecord& r : res.converged) {
    const Field& u = r.u_star;
    Field resid = dense_laplacian(u) * -1.0 - u;
    const Field nl = signed_power(u, ctx.exponents().p);
    for (std::size_t i = 0; i < u.size(); ++i) resid[i] -= ctx.coefficient().Q[i] * nl[i];
    worst_primal = std::max(worst_primal, l2(resid) / l2(u));
  }
  out.primal = {!res.converged.empty() && worst_primal <= 1e-6,
                fmt("%.0f solutions, max primal residual %.2e", static_cast<double>(res.converged.size()), worst_primal)};

  int ok = 0;
  double ratio = 0.0;
  for (const StartResult& s : res.starts) {
    double C = 0.0;
    for (const Field& v : s.trajectory)
      C = std::max({C, 2.0 * energy(ctx, v), lp_norm(gradient(ctx, v), ctx.exponents().p)});
    const double bound = std::max(1.0, C / (1.0 / pc - 0.5));
    bool inside = true;
    for (const Field& v : s.trajectory) {
      const double lhs = std::pow(lp_norm(v, pc), pc - 1.0);
      inside = inside && lhs <= bound;
      ratio = std::max(ratio, lhs / bound);
    }
    ok += inside && ps_boundedness_check(ctx, s.trajectory, C);
  }
  out.ps = {ok == static_cast<int>(res.starts.size()),
            fmt("%.0f/%.0f trajectories, max norm/bound %.3f", ok, static_cast<double>(res.starts.size()), ratio)};
  return out;
}

Outcome asymptotic() {
  const RunConfig cfg = default_config("compare");
  const AsymptoticPair pair = build_asymptotic_coefficient(build_coefficient(cfg), cfg.bump, cfg.p);
  if (cfg.bump.amplitude != 0.3) return {false, "default bump amplitude is not 0.3"};
  const CompareReport rep = compare_levels(pair, cfg.p, cfg.descent);
  const bool order = rep.c_est <= rep.c_inf_est + 1e-3 * std::abs(rep.c_inf_est);

  const FunctionalContext ctx_q(cfg.grid, cfg.p, pair.Q), ctx_inf(ctx_q.shared_resolvent(), cfg.p, pair.Q_inf);
  const Field& w = rep.search_inf.records.front().v_star;
  const Field v = transplant(pair, w);
  double defect = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    defect = std::max(defect, std::abs(pair.Q.q_root[i] * v[i] - pair.Q_inf.q_root[i] * w[i]));
    scale = std::max(scale, std::abs(pair.Q_inf.q_root[i] * w[i]));
  }
  const double jq = nehari_energy(ctx_q, v), jinf = energy(ctx_inf, w);
  const bool chain = jq <= jinf + 1e-10;
  return {order && defect <= 1e-12 * scale && chain,
          fmt("c = %.10f, c_inf = %.10f, transplant defect %.1e, J(t_v v) - J_inf(w) = %.3e", rep.c_est, rep.c_inf_est,
              defect / scale, jq - jinf)};
}

Outcome farfield() {
  const RunConfig cfg = default_config("farfield");
  if (cfg.grid.dimension != 3 || cfg.grid.points_per_axis != 64 || cfg.grid.shell_epsilon <= 0.0)
    return {false, "far-field defaults are not the N = 3, n = 64, absorbing configuration"};
  const FunctionalContext ctx(cfg.grid, cfg.p, build_coefficient(cfg));
  const SolutionRecord rec = find_critical_point(ctx, farfield_initial_field(ctx, 1), cfg.descent);
  const SphereSamples g = farfield_amplitude(ctx, rec.u_star, sphere_grid(3, cfg.farfield.n_theta, cfg.farfield.n_phi, cfg.bump.center));
  FarfieldOptions opt;
  opt.inner_radius = cfg.bump.radius;
  opt.shell_width = cfg.farfield.shell_width;
  const FarfieldReport rep = decay_and_expansion_check(ctx, rec.u_star, g, opt);
  const auto& e = rep.expansion;
  const std::size_t m = e.size();
  const bool tail = m >= 3 && e[m - 2].error <= e[m - 3].error && e[m - 1].error <= e[m - 2].error;
  const bool window = rep.decay_exponent >= 0.8 && rep.decay_exponent <= 1.2;
  return {tail && window, fmt("decay exponent %.3f, last three expansion errors %.4g %.4g %.4g", rep.decay_exponent,
                              m >= 3 ? e[m - 3].error : NAN, m >= 2 ? e[m - 2].error : NAN, m >= 1 ? e[m - 1].error : NAN)};
}

Outcome full_selftest(const std::string& cli) {
  const fs::path out = fs::temp_directory_path() / "helmdual_acceptance_selftest";
  fs::remove_all(out);
  const std::string cmd = "\"" + cli + "\" selftest --out \"" + out.string() + "\" > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  const bool exit0 = rc == 0;
  int rows = 0, passed = 0;
  std::ifstream in(out / "selftest.csv");
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    ++rows;
    std::stringstream ss(line);
    std::string crit, name, pass;
    std::getline(ss, crit, ',');
    std::getline(ss, name, ',');
    std::getline(ss, pass, ',');
    passed += pass == "true";
  }
  return {exit0 && rows > 0 && passed == rows, fmt("exit status %.0f, %.0f/%.0f suites pass", rc, passed, rows)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "helmdual";
  int failures = 0;
  auto report = [&](int id, const char* name, const Outcome& o, double seconds, double limit) {
    const bool pass = o.pass && (limit <= 0.0 || seconds < limit);
    failures += !pass;
    std::printf("%s criterion %2d  %-28s %s [%.1f s%s]\n", pass ? "PASS" : "FAIL", id, name, o.detail.c_str(),
                seconds, limit > 0.0 ? fmt(", limit %.0f s", limit).c_str() : "");
    std::fflush(stdout);
  };
  auto timed = [&](int id, const char* name, double limit, const std::function<Outcome()>& fn) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw ") + e.what()};
    }
    report(id, name, o, std::chrono::duration<double>(Clock::now() - t0).count(), limit);
  };

  timed(1, "operator exactness", 5.0, operator_exactness);
  timed(2, "K symmetry", 5.0, k_symmetry);
  timed(3, "gradient correctness", 30.0, gradient_check);
  timed(4, "fibering maximum", 0.0, fibering);
  timed(5, "reverse Holder", 0.0, reverse_holder);
  try {
    const SolverOutcomes s = solver();
    report(6, "solver run", s.run, s.seconds, 300.0);
    report(7, "primal consistency", s.primal, 0.0, 0.0);
    report(8, "Palais-Smale bound", s.ps, 0.0, 0.0);
  } catch (const std::exception& e) {
    for (int id : {6, 7, 8}) report(id, "solver run", {false, std::string("threw ") + e.what()}, 0.0, 0.0);
  }
  timed(9, "asymptotic comparison", 600.0, asymptotic);
  timed(10, "far field", 300.0, farfield);
  timed(11, "full selftest", 1200.0, [&] { return full_selftest(cli); });
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

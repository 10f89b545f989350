#include "helmdual/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <random>

#include "helmdual/asymptotic.hpp"
#include "helmdual/config.hpp"
#include "helmdual/error.hpp"
#include "helmdual/farfield.hpp"
#include "helmdual/field_io.hpp"

namespace helmdual {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

CheckResult finish(CheckResult r, Clock::time_point t0) {
  r.seconds = since(t0);
  if (r.limit_seconds > 0.0 && r.seconds > r.limit_seconds) {
    r.pass = false;
    r.detail += fmt("; runtime %.1f s over limit %.0f s", r.seconds, r.limit_seconds);
  }
  return r;
}

FunctionalContext reference_context() {
  const RunConfig cfg = default_config("solve");
  return FunctionalContext(cfg.grid, cfg.p, build_coefficient(cfg));
}

Field random_field(const GridSpec& g, std::mt19937_64& rng) {
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

}  // namespace

CheckResult check_operator_exactness(std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult r{1, "operator exactness", false, 0.0, 5.0, ""};
  const GridSpec g{2, 6.0, 32, 0.0};
  const Resolvent R(g);
  const auto sigma = helmholtz_multiplier(g);
  const int n = g.points_per_axis;
  const double dk = 2.0 * std::numbers::pi / g.box_length;
  double worst = 0.0, worst_max = 0.0, worst_lap = 0.0;
  int modes = 0;
  // cos(2πr/n) built from the first octant with exact quadrant symmetries;
  // plain sampling leaks rounding noise into near-shell modes where |σ| ~ 10.
  auto octant = [n](int s) {
    return s <= n / 8 ? std::cos(2.0 * std::numbers::pi * s / n) : std::sin(2.0 * std::numbers::pi * (n / 4 - s) / n);
  };
  auto exact_cos = [&](int r) {
    r = ((r % n) + n) % n;
    if (r <= n / 4) return octant(r);
    if (r <= n / 2) return -octant(n / 2 - r);
    if (r <= 3 * n / 4) return -octant(r - n / 2);
    return octant(n - r);
  };
  std::vector<double> cos_table(n), sin_table(n);
  for (int r = 0; r < n; ++r) {
    cos_table[r] = exact_cos(r);
    sin_table[r] = exact_cos(r - n / 4);
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double k1 = dk * signed_frequency(a, n), k2 = dk * signed_frequency(b, n);
      const double s = sigma[static_cast<std::size_t>(a) * n + b];
      for (int kind = 0; kind < 2; ++kind) {
        // Phase reduced exactly mod n so every sample comes from the same table.
        Field f(g);
        for (std::size_t i = 0; i < f.size(); ++i) {
          const Index3 j = unravel(g, i);
          const int r = ((signed_frequency(a, n) * j[0] + signed_frequency(b, n) * j[1]) % n + n) % n;
          f[i] = kind == 0 ? cos_table[r] : sin_table[r];
        }
        if (max_abs(f) < 1e-8) continue;
        ++modes;
        const Field expect = f * s;
        worst = std::max(worst, lp_norm(R.apply(f) - expect, 2.0) / lp_norm(expect, 2.0));
        worst_max = std::max(worst_max, max_abs(R.apply(f) - expect) / max_abs(expect));
        const double k2sum = k1 * k1 + k2 * k2;
        if (k2sum > 0.0) {
          const Field lap = f * (-k2sum);
          worst_lap = std::max(worst_lap, lp_norm(R.laplacian(f) - lap, 2.0) / lp_norm(lap, 2.0));
        }
      }
    }
  std::mt19937_64 rng(seed);
  double worst_id = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const Field f = random_field(g, rng);
    worst_id = std::max(worst_id, lp_norm(R.helmholtz(R.apply(f)) - f, 2.0) / lp_norm(f, 2.0));
  }
  r.pass = worst <= 1e-13 && worst_max <= 1e-13 && worst_id <= 1e-12 && worst_lap <= 1e-13;
  r.detail = fmt("%.0f modes: eigen rel L2 err %.2e (max-norm %.2e), laplacian %.2e", modes, worst, worst_max,
                 worst_lap) +
             fmt(", (-lap-1)Rf=f rel err %.2e", worst_id);
  return finish(r, t0);
}

CheckResult check_k_symmetry(std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult r{2, "K symmetry", false, 0.0, 5.0, ""};
  const auto ctx = reference_context();
  std::mt19937_64 rng(seed + 2);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Field v = random_field(ctx.grid(), rng), w = random_field(ctx.grid(), rng);
    const double a = inner(v, apply_K(ctx, w)), b = inner(w, apply_K(ctx, v));
    worst = std::max(worst, std::abs(a - b) / (lp_norm(v, 2.0) * lp_norm(w, 2.0)));
  }
  r.pass = worst <= 1e-11;
  r.detail = fmt("20 pairs: max |<v,Kw>-<w,Kv>|/(|v||w|) = %.2e", worst);
  return finish(r, t0);
}

CheckResult check_gradient(std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult r{3, "gradient correctness", false, 0.0, 30.0, ""};
  const auto ctx = reference_context();
  std::mt19937_64 rng(seed + 3);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  const double h = 1e-5;
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    Field v(ctx.grid());
    for (double& x : v.values()) x = (0.1 + 0.9 * ud(rng)) * (ud(rng) < 0.5 ? -1.0 : 1.0);
    const Field g = gradient(ctx, v);
    Field w = random_field(ctx.grid(), rng);
    w *= 1.0 / lp_norm(w, 2.0);
    w += g * (1.0 / lp_norm(g, 2.0));
    const double exact = inner(g, w);
    const double fd = (energy(ctx, v + w * h) - energy(ctx, v - w * h)) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - exact) / std::abs(exact));
  }
  r.pass = worst <= 1e-5;
  r.detail = fmt("10 fields with |v| >= 0.1: max central-difference rel err %.2e", worst);
  return finish(r, t0);
}

CheckResult check_fibering(std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult r{4, "fibering maximum", false, 0.0, 0.0, ""};
  const auto ctx = reference_context();
  double worst_slack = INFINITY, worst_scale = 0.0, worst_direct = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Field v = random_initial_field(ctx, seed * 1000 + 40 + i);
    const double t = fibering_scale(ctx, v);
    const double top = energy(ctx, v * t);
    if (i < 10)
      for (int k = 0; k < 50; ++k) {
        const double s = t * std::pow(10.0, -1.0 + 2.0 * k / 49.0);
        worst_slack = std::min(worst_slack, top - energy(ctx, v * s));
      }
    const double e = nehari_energy(ctx, v);
    worst_scale = std::max(worst_scale, std::abs(nehari_energy(ctx, v * 3.0) - e) / e);
    worst_direct = std::max(worst_direct, std::abs(top - e) / e);
  }
  r.pass = worst_slack >= -1e-12 && worst_scale <= 1e-12 && worst_direct <= 1e-12;
  r.detail = fmt("min J(t_v v)-J(sv) = %.2e; nehari scale rel err %.2e; vs J(t_v v) %.2e", worst_slack, worst_scale,
                 worst_direct);
  return finish(r, t0);
}

CheckResult check_reverse_holder(std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult r{5, "reverse Holder inequalities", false, 0.0, 0.0, ""};
  const auto ctx = reference_context();
  const double pc = ctx.exponents().p_conj;
  std::mt19937_64 rng(seed + 5);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  double scalar_slack = INFINITY;
  for (int i = 0; i < 100000; ++i) {
    const double a = ud(rng) + 1e-300, b = ud(rng) + 1e-300;
    const double lhs = (std::pow(a, pc - 1.0) - std::pow(b, pc - 1.0)) * (a - b);
    const double rhs = (pc - 1.0) * (a - b) * (a - b) * std::pow(a + b, pc - 2.0);
    scalar_slack = std::min(scalar_slack, lhs - rhs);
  }
  double field_slack = INFINITY;
  for (int i = 0; i < 100; ++i) {
    const Field v = random_field(ctx.grid(), rng), w = random_field(ctx.grid(), rng);
    const double lhs = inner(signed_power(v, pc) - signed_power(w, pc), v - w);
    Field sum(ctx.grid());
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = std::abs(v[k]) + std::abs(w[k]);
    const double d = lp_norm(v - w, pc);
    const double rhs = (pc - 1.0) * d * d * std::pow(lp_norm(sum, pc), pc - 2.0);
    field_slack = std::min(field_slack, (lhs - rhs) / lhs);
  }
  r.pass = scalar_slack >= -1e-12 && field_slack >= -1e-12;
  r.detail = fmt("scalar min slack %.2e over 1e5 pairs; field min relative slack %.2e over 100 pairs", scalar_slack,
                 field_slack);
  return finish(r, t0);
}

std::vector<CheckResult> check_solver_run(std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult run{6, "solver run", false, 0.0, 300.0, ""};
  CheckResult primal{7, "primal consistency", false, 0.0, 0.0, ""};
  CheckResult ps{8, "Palais-Smale bound", false, 0.0, 0.0, ""};
  const auto ctx = reference_context();
  DescentConfig cfg;
  cfg.rng_seed = seed;
  cfg.keep_trajectory = true;
  try {
    const MultistartResult res = multistart_search(ctx, cfg);
    int converged = 0;
    double worst_res = 0.0, min_level = INFINITY, worst_rise = -INFINITY;
    for (const auto& s : res.starts) {
      if (s.status == DescentStatus::Converged) ++converged;
      worst_res = std::max(worst_res, s.dual_residual);
      min_level = std::min(min_level, s.level);
      for (std::size_t k = 1; k < s.energies.size(); ++k)
        worst_rise = std::max(worst_rise, s.energies[k] - s.energies[k - 1]);
    }
    run.pass = converged == cfg.multistart_count && worst_res <= 1e-8 && min_level > 0.0 && worst_rise <= 1e-12 &&
               res.records.size() >= 2;
    run.detail = fmt("%.0f/20 converged, max dual residual %.2e, min level %.10f, max energy rise %.2e", converged,
                     worst_res, min_level, worst_rise) +
                 fmt(", %.0f distinct pairs", static_cast<double>(res.records.size()));
    run = finish(run, t0);

    const auto t1 = Clock::now();
    double worst_primal = 0.0;
    for (const auto& rec : res.converged) worst_primal = std::max(worst_primal, rec.primal_residual);
    primal.pass = !res.converged.empty() && worst_primal <= 1e-6;
    primal.detail = fmt("max primal residual %.2e over %.0f solutions", worst_primal,
                        static_cast<double>(res.converged.size()));
    primal = finish(primal, t1);

    const auto t2 = Clock::now();
    int ok = 0;
    double worst_ratio = 0.0;
    const double pc = ctx.exponents().p_conj;
    for (const auto& s : res.starts) {
      const double C = ps_constant(ctx, s.trajectory);
      if (ps_boundedness_check(ctx, s.trajectory, C)) ++ok;
      const double bound = std::max(1.0, C / (1.0 / pc - 0.5));
      for (const Field& v : s.trajectory) worst_ratio = std::max(worst_ratio, std::pow(lp_norm(v, pc), pc - 1.0) / bound);
    }
    ps.pass = ok == static_cast<int>(res.starts.size());
    ps.detail = fmt("%.0f/%.0f trajectories within the bound, max norm/bound %.3f", ok,
                    static_cast<double>(res.starts.size()), worst_ratio);
    ps = finish(ps, t2);
  } catch (const Error& e) {
    run.detail = primal.detail = ps.detail = e.what();
    run = finish(run, t0);
  }
  return {run, primal, ps};
}

CheckResult check_asymptotic(std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult r{9, "asymptotic comparison", false, 0.0, 600.0, ""};
  try {
    const RunConfig cfg = default_config("compare");
    const Coefficient Q_inf = build_coefficient(cfg);
    const AsymptoticPair pair = build_asymptotic_coefficient(Q_inf, cfg.bump, cfg.p);
    DescentConfig dc = cfg.descent;
    dc.rng_seed = seed;
    const CompareReport rep = compare_levels(pair, cfg.p, dc);
    const bool order = rep.c_est <= rep.c_inf_est + 1e-3 * std::abs(rep.c_inf_est);
    r.pass = order && rep.transplant_check;
    r.detail = fmt("c = %.10f, c_inf = %.10f, gap %.3e, transplant defect %.1e", rep.c_est, rep.c_inf_est, rep.gap,
                   rep.transplant_defect) +
               fmt("; chain %.10f <= %.10f <= %.10f", rep.chain_Q, rep.chain_inf_scaled, rep.chain_inf);
  } catch (const Error& e) {
    r.detail = e.what();
  }
  return finish(r, t0);
}

CheckResult check_farfield(std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult r{10, "far field", false, 0.0, 300.0, ""};
  try {
    const RunConfig cfg = default_config("farfield");
    const FunctionalContext ctx(cfg.grid, cfg.p, build_coefficient(cfg));
    const SolutionRecord rec = find_critical_point(ctx, farfield_initial_field(ctx, seed), cfg.descent);
    const SphereSamples g = farfield_amplitude(
        ctx, rec.u_star, sphere_grid(cfg.grid.dimension, cfg.farfield.n_theta, cfg.farfield.n_phi, cfg.bump.center));
    FarfieldOptions opt;
    opt.inner_radius = cfg.bump.radius;
    opt.shell_width = cfg.farfield.shell_width;
    const FarfieldReport rep = decay_and_expansion_check(ctx, rec.u_star, g, opt);
    r.pass = rep.exponent_in_window && rep.tail_nonincreasing;
    r.detail = fmt("decay exponent %.3f (raw %.3f, target %.1f), expansion error last three", rep.decay_exponent,
                   rep.raw_exponent, rep.target_exponent);
    const std::size_t m = rep.expansion.size();
    for (std::size_t k = m >= 3 ? m - 3 : 0; k < m; ++k) r.detail += fmt(" %.4g", rep.expansion[k].error);
  } catch (const Error& e) {
    r.detail = e.what();
  }
  return finish(r, t0);
}

CheckResult check_io(std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult r{0, "field file and config round trip", false, 0.0, 0.0, ""};
  std::mt19937_64 rng(seed + 11);
  const Field f = random_field(GridSpec{3, 5.5, 8, 0.0}, rng);
  const Field back = read_field(write_field(f));
  bool same = back.grid() == GridSpec{3, 5.5, 8, 0.0};
  for (std::size_t i = 0; same && i < f.size(); ++i) same = std::memcmp(f.data().data() + i, back.data().data() + i, sizeof(double)) == 0;
  bool cfg_ok = true;
  for (const char* mode : {"solve", "compare", "farfield", "selftest"}) {
    const RunConfig c = default_config(mode);
    cfg_ok = cfg_ok && parse_config(serialize_config(c)) == c;
  }
  r.pass = same && cfg_ok;
  r.detail = std::string("field bitwise ") + (same ? "identical" : "different") + ", config round trip " +
             (cfg_ok ? "exact" : "mismatch");
  return finish(r, t0);
}

std::vector<CheckResult> run_selftest(const SelftestOptions& opt, const CheckSink& sink) {
  const auto t0 = Clock::now();
  std::vector<CheckResult> out;
  auto emit = [&](CheckResult r) {
    if (sink) sink(r);
    out.push_back(std::move(r));
  };
  emit(check_operator_exactness(opt.seed));
  emit(check_k_symmetry(opt.seed));
  emit(check_gradient(opt.seed));
  emit(check_fibering(opt.seed));
  emit(check_reverse_holder(opt.seed));
  if (opt.include_heavy) {
    for (auto& r : check_solver_run(opt.seed)) emit(std::move(r));
    emit(check_asymptotic(opt.seed));
    emit(check_farfield(opt.seed));
  }
  emit(check_io(opt.seed));

  CheckResult total{11, "full selftest", true, 0.0, opt.total_limit_seconds, ""};
  int failed = 0;
  for (const auto& r : out)
    if (!r.pass) ++failed;
  total.pass = failed == 0 && opt.include_heavy;
  total.detail = fmt("%.0f checks, %.0f failed", static_cast<double>(out.size()), failed);
  if (!opt.include_heavy) total.detail += "; heavy suites skipped";
  emit(finish(total, t0));
  return out;
}

}  // namespace helmdual

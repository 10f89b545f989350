#include "helmdual/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <string>
#include <thread>

#include "helmdual/error.hpp"
#include "krylov.hpp"

namespace helmdual {

void DescentConfig::validate() const {
  auto positive = [](double x, const char* name) {
    if (!(x > 0.0)) throw Error(ErrorKind::InvalidArgument, std::string(name) + " must be positive");
  };
  positive(tol_residual, "tol_residual");
  positive(step_init, "step_init");
  positive(dedup_rel_threshold, "dedup_rel_threshold");
  positive(newton_switch, "newton_switch");
  if (max_iters < 0) throw Error(ErrorKind::InvalidArgument, "max_iters must be >= 0");
  if (multistart_count < 1) throw Error(ErrorKind::InvalidArgument, "multistart_count must be >= 1");
  if (lanczos_steps < 4) throw Error(ErrorKind::InvalidArgument, "lanczos_steps must be >= 4");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw Error(ErrorKind::InvalidArgument, "armijo_c must lie in (0,1)");
  if (!(armijo_shrink > 0.0 && armijo_shrink < 1.0))
    throw Error(ErrorKind::InvalidArgument, "armijo_shrink must lie in (0,1)");
}

Field descent_direction(const FunctionalContext& ctx, const Field& v) {
  return signed_power(gradient(ctx, v), ctx.exponents().p);
}

namespace {

struct State {
  Field v;
  Field Kv;
  double E = 0.0;
};

// t_w w together with K(t_w w) and its energy; empty outside U+.
std::optional<State> project(const FunctionalContext& ctx, const Field& w) {
  if (!w.all_finite() || w.is_zero()) return std::nullopt;
  const double pc = ctx.exponents().p_conj;
  Field Kw = apply_K(ctx, w);
  const double B = inner(w, Kw);
  if (!(B > 0.0)) return std::nullopt;
  const double A = lp_norm_pow(w, pc);
  const double t = std::pow(A / B, 1.0 / (2.0 - pc));
  Kw *= t;
  State s{w * t, std::move(Kw), 0.0};
  s.E = std::pow(t, pc) * A / pc - 0.5 * t * t * B;
  if (!std::isfinite(s.E)) return std::nullopt;
  return s;
}

class Descent {
 public:
  Descent(const FunctionalContext& ctx, const DescentConfig& cfg) : ctx_(ctx), cfg_(cfg) {}

  DescentOutcome run(const Field& v0) {
    require_same_grid(ctx_.grid(), v0.grid());
    cfg_.validate();
    fibering_scale(ctx_, v0);  // throws ZeroField / NotInUPlus
    auto s0 = project(ctx_, v0);
    if (!s0) throw Error(ErrorKind::NotInUPlus, "initial field is not admissible");
    State cur = std::move(*s0);
    power_step_ = duality_step_ = cfg_.step_init;

    DescentOutcome out;
    out.energies.push_back(cur.E);
    if (cfg_.keep_trajectory) out.trajectory.push_back(cur.v);

    const double pc = ctx_.exponents().p_conj;
    int it = 0;
    double r = 0.0;
    for (;; ++it) {
      const Field g = signed_power(cur.v, pc) - cur.Kv;
      r = dual_residual(ctx_, cur.v, g);
      if (r <= cfg_.tol_residual) {
        out.status = DescentStatus::Converged;
        break;
      }
      if (it >= cfg_.max_iters) {
        out.status = DescentStatus::MaxIters;
        break;
      }
      std::optional<State> next;
      if (r < cfg_.newton_switch) {
        next = newton_step(cur, g);
        if (next) ++out.newton_steps;
      }
      if (!next) {
        next = power_step(cur, g);
        if (next) ++out.power_steps;
      }
      if (!next) {
        next = duality_step(cur, g);
        if (next) ++out.duality_steps;
      }
      if (!next) {
        out.status = DescentStatus::MaxIters;
        break;
      }
      cur = std::move(*next);
      out.energies.push_back(cur.E);
      if (cfg_.keep_trajectory) out.trajectory.push_back(cur.v);
      if (cur.E < cfg_.divergence_floor) {
        ++it;
        const Field g2 = signed_power(cur.v, pc) - cur.Kv;
        r = dual_residual(ctx_, cur.v, g2);
        out.status = DescentStatus::Diverged;
        break;
      }
    }

    SolutionRecord& rec = out.record;
    rec.u_star = dual_to_primal(ctx_, cur.v);
    rec.primal_residual = primal_residual(ctx_, rec.u_star);
    rec.v_star = std::move(cur.v);
    rec.level = cur.E;
    rec.dual_residual = r;
    rec.iterations = it;
    return out;
  }

 private:
  // Candidate v = |y|^{p-2} y for a conjugate-variable point y, projected.
  std::optional<State> from_conjugate(const Field& y) const {
    return project(ctx_, signed_power(y, ctx_.exponents().p));
  }

  std::optional<State> newton_step(const State& cur, const Field& g) const {
    const GridSpec& grid = ctx_.grid();
    const double p = ctx_.exponents().p;
    const Field z = signed_power(cur.v, ctx_.exponents().p_conj);
    Field sw(grid);
    for (std::size_t i = 0; i < sw.size(); ++i) sw[i] = std::sqrt((p - 1.0) * std::pow(std::abs(z[i]), p - 2.0));

    auto times_sw = [&](const detail::Vec& x) {
      Field f(grid);
      for (std::size_t i = 0; i < f.size(); ++i) f[i] = sw[i] * x[i];
      return f;
    };
    const detail::LinearOp S = [&](const detail::Vec& x, detail::Vec& y) {
      const Field k = apply_K(ctx_, times_sw(x));
      y.resize(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - sw[i] * k[i];
    };

    detail::Vec b(g.size()), minus_b(g.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
      b[i] = sw[i] * g[i];
      minus_b[i] = -b[i];
    }
    const auto sol = detail::minres(S, minus_b, 1e-10, 500);
    Field dz = apply_K(ctx_, times_sw(sol.x)) - g;

    const auto ritz = detail::lanczos_lowest(S, b.size(), cfg_.lanczos_steps, 4);
    detail::Vec sc(b.size());
    for (std::size_t i = 0; i < sc.size(); ++i) sc[i] = sw[i] * z[i];
    const double nsc = std::sqrt(detail::dot(sc, sc));
    std::size_t iscale = 0;
    double best = -1.0;
    for (std::size_t k = 0; k < ritz.values.size(); ++k) {
      const double ov = std::abs(detail::dot(ritz.vectors[k], sc)) / nsc;
      if (ov > best) {
        best = ov;
        iscale = k;
      }
    }
    for (std::size_t k = 0; k < ritz.values.size(); ++k) {
      const double lam = ritz.values[k];
      if (k == iscale || lam >= 0.0) continue;
      const double c = -2.0 * detail::dot(b, ritz.vectors[k]) / std::abs(lam);
      dz += apply_K(ctx_, times_sw(ritz.vectors[k])) * (c / (1.0 - lam));
    }

    const double tol = cur.E + 1e-14 * std::abs(cur.E);
    for (double st = 1.0; st > 1e-6; st *= 0.5) {
      auto cand = from_conjugate(z + dz * st);
      if (cand && cand->E <= tol) return cand;
    }
    return std::nullopt;
  }

  std::optional<State> power_step(const State& cur, const Field& g) {
    const double p = ctx_.exponents().p;
    const Field z = signed_power(cur.v, ctx_.exponents().p_conj);
    Field wg(ctx_.grid());
    for (std::size_t i = 0; i < wg.size(); ++i) wg[i] = (p - 1.0) * std::pow(std::abs(z[i]), p - 2.0) * g[i];
    const double slope = inner(g, wg);
    if (!(slope > 0.0)) return std::nullopt;
    while (power_step_ > 1e-14 * cfg_.step_init) {
      auto cand = from_conjugate(z - g * power_step_);
      if (cand && cand->E <= cur.E - cfg_.armijo_c * power_step_ * slope) {
        power_step_ = std::min(power_step_ / cfg_.armijo_shrink, cfg_.step_init);
        return cand;
      }
      power_step_ *= cfg_.armijo_shrink;
    }
    power_step_ = cfg_.step_init;
    return std::nullopt;
  }

  std::optional<State> duality_step(const State& cur, const Field& g) {
    const Field d = signed_power(g, ctx_.exponents().p);
    const double slope = inner(g, d);
    if (!(slope > 0.0)) return std::nullopt;
    while (duality_step_ > 1e-14 * cfg_.step_init) {
      auto cand = project(ctx_, cur.v - d * duality_step_);
      if (cand && cand->E <= cur.E - cfg_.armijo_c * duality_step_ * slope) {
        duality_step_ = std::min(duality_step_ / cfg_.armijo_shrink, cfg_.step_init);
        return cand;
      }
      duality_step_ *= cfg_.armijo_shrink;
    }
    duality_step_ = cfg_.step_init;
    return std::nullopt;
  }

  const FunctionalContext& ctx_;
  DescentConfig cfg_;
  double power_step_ = 1.0;
  double duality_step_ = 1.0;
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::vector<Index3> lattice_shifts(const FunctionalContext& ctx) {
  std::vector<Index3> shifts;
  const int step = ctx.unit_steps();
  if (step == 0) return {{0, 0, 0}};
  const int periods = static_cast<int>(ctx.grid().box_length);
  const int N = ctx.grid().dimension;
  for (int a = 0; a < periods; ++a)
    for (int b = 0; b < periods; ++b)
      for (int c = 0; c < (N == 3 ? periods : 1); ++c) shifts.push_back({a * step, b * step, c * step});
  return shifts;
}

}  // namespace

DescentOutcome descend(const FunctionalContext& ctx, const Field& v0, const DescentConfig& cfg) {
  return Descent(ctx, cfg).run(v0);
}

SolutionRecord find_critical_point(const FunctionalContext& ctx, const Field& v0, const DescentConfig& cfg) {
  DescentOutcome out = descend(ctx, v0, cfg);
  if (out.status == DescentStatus::MaxIters)
    throw Error(ErrorKind::MaxIters, "no convergence after " + std::to_string(out.record.iterations) +
                                         " iterations, dual residual " + std::to_string(out.record.dual_residual));
  if (out.status == DescentStatus::Diverged)
    throw Error(ErrorKind::Diverged, "energy fell below the divergence floor");
  return std::move(out.record);
}

double orbit_distance(const FunctionalContext& ctx, const Field& v, const Field& w) {
  require_same_grid(v.grid(), w.grid());
  require_same_grid(ctx.grid(), v.grid());
  const double pc = ctx.exponents().p_conj;
  double best = INFINITY;
  std::vector<double> dm(v.size()), dp(v.size());
  for (const Index3& s : lattice_shifts(ctx)) {
    const Field ws = shifted(w, s);
    for (std::size_t i = 0; i < v.size(); ++i) {
      dm[i] = std::pow(std::abs(v[i] - ws[i]), pc);
      dp[i] = std::pow(std::abs(v[i] + ws[i]), pc);
    }
    best = std::min({best, integrate(v.grid(), dm), integrate(v.grid(), dp)});
  }
  return std::pow(best, 1.0 / pc);
}

Field random_initial_field(const FunctionalContext& ctx, std::uint64_t seed) {
  const GridSpec& g = ctx.grid();
  const int N = g.dimension;
  const double L = g.box_length;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> freq(-3, 3);
  std::normal_distribution<double> amp(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<std::size_t> support;
  if (!ctx.coefficient().periodic)
    for (std::size_t i = 0; i < g.size(); ++i)
      if (ctx.coefficient().Q[i] > 0.0) support.push_back(i);

  for (int attempt = 0; attempt < 1000; ++attempt) {
    struct Mode {
      Point3 k;
      double a, phase;
    };
    std::vector<Mode> modes(8);
    for (auto& m : modes) {
      m.k = {0.0, 0.0, 0.0};
      for (int d = 0; d < N; ++d) m.k[d] = 2.0 * std::numbers::pi * freq(rng) / L;
      m.a = amp(rng);
      m.phase = 2.0 * std::numbers::pi * unit(rng);
    }
    Point3 c{0.0, 0.0, 0.0};
    if (support.empty()) {
      for (int d = 0; d < N; ++d) c[d] = L * unit(rng);
    } else {
      c = coordinates(g, support[static_cast<std::size_t>(unit(rng) * support.size()) % support.size()]);
    }
    Field f = Field::from_function(g, [&](const Point3& x) {
      double s = 0.0;
      for (const auto& m : modes) s += m.a * std::cos(m.k[0] * x[0] + m.k[1] * x[1] + m.k[2] * x[2] + m.phase);
      double d2 = 0.0;
      for (int d = 0; d < N; ++d) {
        const double dx = std::remainder(x[d] - c[d], L);
        d2 += dx * dx;
      }
      return s * std::exp(-0.5 * d2);
    });
    if (!f.is_zero() && quadratic_form(ctx, f) > 0.0) return f;
  }
  throw Error(ErrorKind::NotInUPlus, "no admissible random initial field after 1000 draws");
}

SolutionRecord recenter(const FunctionalContext& ctx, SolutionRecord rec) {
  const GridSpec& g = ctx.grid();
  const double pc = ctx.exponents().p_conj;
  Index3 steps{0, 0, 0};
  rec.orbit_shift = {0, 0, 0};
  if (const int step = ctx.unit_steps(); step > 0) {
    const double L = g.box_length;
    const int periods = static_cast<int>(L);
    for (int d = 0; d < g.dimension; ++d) {
      std::vector<double> sx(rec.v_star.size()), cx(rec.v_star.size());
      for (std::size_t i = 0; i < rec.v_star.size(); ++i) {
        const double m = std::pow(std::abs(rec.v_star[i]), pc);
        const double th = 2.0 * std::numbers::pi * coordinates(g, i)[d] / L;
        sx[i] = m * std::sin(th);
        cx[i] = m * std::cos(th);
      }
      double c = std::atan2(pairwise_sum(sx), pairwise_sum(cx)) * L / (2.0 * std::numbers::pi);
      if (c < 0.0) c += L;
      int s = static_cast<int>(std::lround(0.5 * L - c));
      s = ((s % periods) + periods) % periods;
      rec.orbit_shift[d] = s;
      steps[d] = s * step;
    }
  }
  std::size_t imax = 0;
  for (std::size_t i = 1; i < rec.v_star.size(); ++i)
    if (std::abs(rec.v_star[i]) > std::abs(rec.v_star[imax])) imax = i;
  rec.sign = rec.v_star[imax] < 0.0 ? -1 : 1;
  rec.v_star = shifted(rec.v_star, steps) * static_cast<double>(rec.sign);
  rec.u_star = shifted(rec.u_star, steps) * static_cast<double>(rec.sign);
  return rec;
}

int worker_count() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (const char* env = std::getenv("HELMDUAL_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) return std::min(cap, hw);
  }
  return hw;
}

std::vector<SolutionRecord> deduplicate(const FunctionalContext& ctx, std::vector<SolutionRecord> records,
                                        double rel_threshold) {
  const double pc = ctx.exponents().p_conj;
  std::vector<SolutionRecord> kept;
  std::vector<double> norms;
  for (auto& rec : records) {
    const double nr = lp_norm(rec.v_star, pc);
    bool fresh = true;
    for (std::size_t k = 0; k < kept.size() && fresh; ++k)
      if (orbit_distance(ctx, rec.v_star, kept[k].v_star) <= rel_threshold * std::max(nr, norms[k])) fresh = false;
    if (fresh) {
      kept.push_back(std::move(rec));
      norms.push_back(nr);
    }
  }
  return kept;
}

MultistartResult multistart_search(const FunctionalContext& ctx, const DescentConfig& cfg) {
  cfg.validate();
  const int count = cfg.multistart_count;
  MultistartResult res;
  res.starts.resize(count);
  std::vector<std::optional<SolutionRecord>> found(count);

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      StartResult& sr = res.starts[i];
      sr.seed = splitmix64(cfg.rng_seed ^ (0xD1B54A32D192ED03ULL * static_cast<std::uint64_t>(i + 1)));
      try {
        DescentOutcome out = descend(ctx, random_initial_field(ctx, sr.seed), cfg);
        sr.status = out.status;
        sr.iterations = out.record.iterations;
        sr.level = out.record.level;
        sr.dual_residual = out.record.dual_residual;
        sr.energies = std::move(out.energies);
        sr.trajectory = std::move(out.trajectory);
        if (out.status == DescentStatus::Converged && out.record.level > 0.0)
          found[i] = recenter(ctx, std::move(out.record));
      } catch (const Error&) {
        sr.status = DescentStatus::MaxIters;
      }
    }
  };
  const int workers = std::min(worker_count(), count);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (auto& f : found)
    if (f) res.converged.push_back(std::move(*f));
  if (res.converged.empty())
    throw Error(ErrorKind::NoSolutionFound, "none of the " + std::to_string(count) + " starts converged");

  std::vector<SolutionRecord> sorted = res.converged;
  std::sort(sorted.begin(), sorted.end(), [](const SolutionRecord& a, const SolutionRecord& b) {
    if (a.level != b.level) return a.level < b.level;
    return field_hash(a.v_star) < field_hash(b.v_star);
  });
  res.records = deduplicate(ctx, std::move(sorted), cfg.dedup_rel_threshold);
  res.level = res.records.front().level;
  return res;
}

bool ps_boundedness_check(const FunctionalContext& ctx, const std::vector<Field>& iterates, double C) {
  const double pc = ctx.exponents().p_conj;
  const double bound = std::max(1.0, C / (1.0 / pc - 0.5));
  for (const Field& v : iterates)
    if (std::pow(lp_norm(v, pc), pc - 1.0) > bound) return false;
  return true;
}

double ps_constant(const FunctionalContext& ctx, const std::vector<Field>& iterates) {
  const double p = ctx.exponents().p;
  double C = 0.0;
  for (const Field& v : iterates) C = std::max({C, 2.0 * energy(ctx, v), lp_norm(gradient(ctx, v), p)});
  return C;
}

}  // namespace helmdual

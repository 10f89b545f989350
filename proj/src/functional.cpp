#include "helmdual/functional.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "helmdual/error.hpp"

namespace helmdual {

Exponents Exponents::make(int N, double p) {
  if (N != 2 && N != 3) throw Error(ErrorKind::InvalidArgument, "dimension must be 2 or 3");
  Exponents e;
  e.N = N;
  e.p = p;
  e.p_conj = p / (p - 1.0);
  e.lower_bound = 2.0 * (N + 1) / (N - 1);
  e.upper_bound = N == 2 ? INFINITY : 2.0 * N / (N - 2);
  if (!(p > e.lower_bound && p < e.upper_bound))
    throw Error(ErrorKind::InvalidArgument, "exponent p = " + std::to_string(p) + " outside (" +
                                                std::to_string(e.lower_bound) + ", " +
                                                std::to_string(e.upper_bound) + ")");
  return e;
}

Coefficient Coefficient::make(Field Q, double p, bool periodic) {
  const GridSpec& g = Q.grid();
  double qmax = 0.0;
  for (double q : Q.values()) {
    if (!(q >= 0.0)) throw Error(ErrorKind::InvalidArgument, "coefficient must be nonnegative");
    qmax = std::max(qmax, q);
  }
  if (qmax == 0.0) throw Error(ErrorKind::InvalidArgument, "coefficient vanishes identically");
  if (periodic) {
    const double L = g.box_length;
    if (L != std::round(L) || g.points_per_axis % static_cast<int>(L) != 0)
      throw Error(ErrorKind::InvalidArgument, "periodic coefficient needs integer L dividing n");
    const int step = g.points_per_axis / static_cast<int>(L);
    for (int d = 0; d < g.dimension; ++d) {
      Index3 s{0, 0, 0};
      s[d] = step;
      const Field moved = shifted(Q, s);
      for (std::size_t i = 0; i < Q.size(); ++i)
        if (std::abs(moved[i] - Q[i]) > 1e-12 * qmax)
          throw Error(ErrorKind::InvalidArgument, "coefficient is not invariant under unit shifts");
    }
  }
  Coefficient c;
  c.q_root = Field(g);
  for (std::size_t i = 0; i < Q.size(); ++i) c.q_root[i] = std::pow(Q[i], 1.0 / p);
  c.Q = std::move(Q);
  c.periodic = periodic;
  return c;
}

FunctionalContext::FunctionalContext(const GridSpec& grid, double p, Coefficient coefficient)
    : FunctionalContext(std::make_shared<const Resolvent>(grid), p, std::move(coefficient)) {}

FunctionalContext::FunctionalContext(std::shared_ptr<const Resolvent> resolvent, double p,
                                     Coefficient coefficient)
    : resolvent_(std::move(resolvent)),
      exponents_(Exponents::make(resolvent_->grid().dimension, p)),
      coefficient_(std::move(coefficient)),
      weight_(resolvent_->grid().cell_volume()) {
  require_same_grid(resolvent_->grid(), coefficient_.Q.grid());
}

int FunctionalContext::unit_steps() const noexcept {
  if (!coefficient_.periodic) return 0;
  return grid().points_per_axis / static_cast<int>(grid().box_length);
}

double integrate(const GridSpec& grid, std::span<const double> integrand) {
  return grid.cell_volume() * pairwise_sum(integrand);
}

double inner(const Field& a, const Field& b) {
  require_same_grid(a.grid(), b.grid());
  std::vector<double> prod(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) prod[i] = a[i] * b[i];
  return integrate(a.grid(), prod);
}

double lp_norm_pow(const Field& f, double q) {
  std::vector<double> t(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) t[i] = std::pow(std::abs(f[i]), q);
  return integrate(f.grid(), t);
}

double lp_norm(const Field& f, double q) { return std::pow(lp_norm_pow(f, q), 1.0 / q); }

Field signed_power(const Field& f, double e) {
  Field out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = f[i];
    out[i] = x == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(x), e - 1.0), x);
  }
  return out;
}

namespace {

Field pointwise_product(const Field& a, const Field& b) {
  Field out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

}  // namespace

Field apply_K(const FunctionalContext& ctx, const Field& v) {
  require_same_grid(ctx.grid(), v.grid());
  const Field& q = ctx.coefficient().q_root;
  return pointwise_product(q, ctx.resolvent().apply(pointwise_product(q, v)));
}

double quadratic_form(const FunctionalContext& ctx, const Field& v) { return inner(v, apply_K(ctx, v)); }

double energy(const FunctionalContext& ctx, const Field& v) {
  const double pc = ctx.exponents().p_conj;
  return lp_norm_pow(v, pc) / pc - 0.5 * quadratic_form(ctx, v);
}

Field gradient(const FunctionalContext& ctx, const Field& v) {
  return signed_power(v, ctx.exponents().p_conj) - apply_K(ctx, v);
}

namespace {

double fibering_power(const FunctionalContext& ctx, const Field& v, double& mass) {
  if (v.is_zero()) throw Error(ErrorKind::ZeroField, "fibering scale of the zero field");
  const double B = quadratic_form(ctx, v);
  if (!(B > 0.0))
    throw Error(ErrorKind::NotInUPlus, "quadratic form " + std::to_string(B) + " is not positive");
  mass = lp_norm_pow(v, ctx.exponents().p_conj);
  return mass / B;
}

}  // namespace

double fibering_scale(const FunctionalContext& ctx, const Field& v) {
  double mass = 0.0;
  const double ratio = fibering_power(ctx, v, mass);
  return std::pow(ratio, 1.0 / (2.0 - ctx.exponents().p_conj));
}

double nehari_energy(const FunctionalContext& ctx, const Field& v) {
  const double pc = ctx.exponents().p_conj;
  double mass = 0.0;
  const double ratio = fibering_power(ctx, v, mass);
  const double t = std::pow(ratio, 1.0 / (2.0 - pc));
  return (1.0 / pc - 0.5) * std::pow(t, pc) * mass;
}

Field dual_to_primal(const FunctionalContext& ctx, const Field& v) {
  require_same_grid(ctx.grid(), v.grid());
  return ctx.resolvent().apply(pointwise_product(ctx.coefficient().q_root, v));
}

double primal_residual(const FunctionalContext& ctx, const Field& u) {
  require_same_grid(ctx.grid(), u.grid());
  const double p = ctx.exponents().p;
  Field r = ctx.resolvent().helmholtz(u);
  const Field nl = pointwise_product(ctx.coefficient().Q, signed_power(u, p));
  r -= nl;
  const double rn = lp_norm(r, 2.0);
  const double un = lp_norm(u, 2.0);
  return un > 0.0 ? rn / un : rn;
}

double dual_residual(const FunctionalContext& ctx, const Field& v, const Field& g) {
  const auto& e = ctx.exponents();
  const double vn = lp_norm(v, e.p_conj);
  if (vn == 0.0) return lp_norm(g, e.p);
  return lp_norm(g, e.p) / std::pow(vn, e.p_conj - 1.0);
}

double dual_residual(const FunctionalContext& ctx, const Field& v) {
  return dual_residual(ctx, v, gradient(ctx, v));
}

}  // namespace helmdual

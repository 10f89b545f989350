#pragma once

#include <cmath>
#include <memory>

#include "helmdual/grid.hpp"
#include "helmdual/kernel.hpp"

namespace helmdual {

struct Exponents {
  int N = 2;
  double p = 7.0;
  double p_conj = 7.0 / 6.0;
  double lower_bound = 6.0;  // 2(N+1)/(N-1)
  double upper_bound = INFINITY;  // 2N/(N-2), infinite for N = 2

  // Throws InvalidArgument unless 2(N+1)/(N-1) < p < 2N/(N-2).
  static Exponents make(int N, double p);
};

// Nonnegative bounded weight Q with cached Q^{1/p}.
struct Coefficient {
  Field Q;
  Field q_root;
  bool periodic = false;

  // Validates Q >= 0, Q != 0, and for periodic Q integer L, n mod L = 0 and
  // invariance under unit shifts (relative tolerance 1e-12).
  static Coefficient make(Field Q, double p, bool periodic);
};

// Immutable bundle shared by every functional evaluation.
class FunctionalContext {
 public:
  FunctionalContext(const GridSpec& grid, double p, Coefficient coefficient);
  FunctionalContext(std::shared_ptr<const Resolvent> resolvent, double p, Coefficient coefficient);

  const GridSpec& grid() const noexcept { return resolvent_->grid(); }
  const Exponents& exponents() const noexcept { return exponents_; }
  const Coefficient& coefficient() const noexcept { return coefficient_; }
  const Resolvent& resolvent() const noexcept { return *resolvent_; }
  std::shared_ptr<const Resolvent> shared_resolvent() const noexcept { return resolvent_; }
  double weight() const noexcept { return weight_; }
  // Grid points per unit length when Q is periodic, otherwise 0.
  int unit_steps() const noexcept;

 private:
  std::shared_ptr<const Resolvent> resolvent_;
  Exponents exponents_;
  Coefficient coefficient_;
  double weight_ = 1.0;
};

// Quadrature helpers (weight h^N, pairwise summation).
double integrate(const GridSpec& grid, std::span<const double> integrand);
double inner(const Field& a, const Field& b);
double lp_norm(const Field& f, double q);
double lp_norm_pow(const Field& f, double q);  // ∫|f|^q
// |f|^{e-1} sign(f), pointwise; 0 where f = 0.
Field signed_power(const Field& f, double e);

Field apply_K(const FunctionalContext& ctx, const Field& v);
double energy(const FunctionalContext& ctx, const Field& v);
Field gradient(const FunctionalContext& ctx, const Field& v);
double quadratic_form(const FunctionalContext& ctx, const Field& v);
double fibering_scale(const FunctionalContext& ctx, const Field& v);
double nehari_energy(const FunctionalContext& ctx, const Field& v);
Field dual_to_primal(const FunctionalContext& ctx, const Field& v);
// ‖-Δu - u - Q|u|^{p-2}u‖_2 / ‖u‖_2, absolute when u = 0.
double primal_residual(const FunctionalContext& ctx, const Field& u);
// ‖g‖_p / ‖v‖_{p'}^{p'-1}
double dual_residual(const FunctionalContext& ctx, const Field& v);
double dual_residual(const FunctionalContext& ctx, const Field& v, const Field& g);

}  // namespace helmdual

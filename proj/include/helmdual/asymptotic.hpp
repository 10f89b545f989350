#pragma once

#include "helmdual/search.hpp"

namespace helmdual {

// Compactly supported C^∞ bump a·exp(1 - 1/(1 - (r/R)^2)) for r < R.
struct BumpDescriptor {
  Point3 center{0.0, 0.0, 0.0};
  double radius = 1.0;
  double amplitude = 0.0;

  double operator()(const Point3& x, int dimension) const noexcept;
  friend bool operator==(const BumpDescriptor&, const BumpDescriptor&) = default;
};

// Bump sampled on a grid; SupportOverflow if the support leaves [0, L]^N.
Field sample_bump(const GridSpec& grid, const BumpDescriptor& bump);

struct AsymptoticPair {
  Coefficient Q;
  Coefficient Q_inf;
  BumpDescriptor bump;
};

AsymptoticPair build_asymptotic_coefficient(const Coefficient& Q_inf, const BumpDescriptor& bump, double p);

// sup over |x - center| > r of |Q - Q_inf|.
double perturbation_tail(const AsymptoticPair& pair, double r);

// v = (Q_inf / Q)^{1/p} w, zero where Q_inf = 0. HypothesisViolated if Q < Q_inf.
Field transplant(const AsymptoticPair& pair, const Field& w);

struct CompareReport {
  double c_est = 0.0;
  double c_inf_est = 0.0;
  double gap = 0.0;  // c_inf_est - c_est
  bool transplant_check = false;
  // max |Q^{1/p} v - Q_inf^{1/p} w| / max |Q_inf^{1/p} w|
  double transplant_defect = 0.0;
  // J(t_v v), J_inf(t_v w), J_inf(w) for the transplanted best Q_inf solution.
  double chain_Q = 0.0;
  double chain_inf_scaled = 0.0;
  double chain_inf = 0.0;
  std::size_t distinct_Q = 0;
  std::size_t distinct_inf = 0;
  int converged_Q = 0;
  int converged_inf = 0;
  MultistartResult search_Q;
  MultistartResult search_inf;
};

CompareReport compare_levels(const AsymptoticPair& pair, double p, const DescentConfig& cfg);

}  // namespace helmdual

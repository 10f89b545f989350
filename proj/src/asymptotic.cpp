#include "helmdual/asymptotic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "helmdual/error.hpp"

namespace helmdual {

double BumpDescriptor::operator()(const Point3& x, int dimension) const noexcept {
  double r2 = 0.0;
  for (int d = 0; d < dimension; ++d) r2 += (x[d] - center[d]) * (x[d] - center[d]);
  const double s = r2 / (radius * radius);
  if (s >= 1.0) return 0.0;
  return amplitude * std::exp(1.0 - 1.0 / (1.0 - s));
}

Field sample_bump(const GridSpec& grid, const BumpDescriptor& bump) {
  if (!(bump.radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "bump radius must be positive");
  if (!(bump.amplitude >= 0.0)) throw Error(ErrorKind::InvalidArgument, "bump amplitude must be >= 0");
  for (int d = 0; d < grid.dimension; ++d)
    if (bump.center[d] - bump.radius < 0.0 || bump.center[d] + bump.radius > grid.box_length)
      throw Error(ErrorKind::SupportOverflow, "bump support leaves the box along axis " + std::to_string(d));
  return Field::from_function(grid, [&](const Point3& x) { return bump(x, grid.dimension); });
}

AsymptoticPair build_asymptotic_coefficient(const Coefficient& Q_inf, const BumpDescriptor& bump, double p) {
  if (!Q_inf.periodic) throw Error(ErrorKind::InvalidArgument, "Q_inf must be periodic");
  const Field b = sample_bump(Q_inf.Q.grid(), bump);
  return {Coefficient::make(Q_inf.Q + b, p, false), Q_inf, bump};
}

double perturbation_tail(const AsymptoticPair& pair, double r) {
  const GridSpec& g = pair.Q.Q.grid();
  double sup = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point3 x = coordinates(g, i);
    double r2 = 0.0;
    for (int d = 0; d < g.dimension; ++d) r2 += (x[d] - pair.bump.center[d]) * (x[d] - pair.bump.center[d]);
    if (std::sqrt(r2) > r) sup = std::max(sup, std::abs(pair.Q.Q[i] - pair.Q_inf.Q[i]));
  }
  return sup;
}

Field transplant(const AsymptoticPair& pair, const Field& w) {
  require_same_grid(pair.Q.Q.grid(), w.grid());
  Field v(w.grid());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double q = pair.Q.Q[i], qi = pair.Q_inf.Q[i];
    if (q < qi)
      throw Error(ErrorKind::HypothesisViolated, "Q < Q_inf at grid point " + std::to_string(i));
    v[i] = qi == 0.0 ? 0.0 : pair.Q_inf.q_root[i] / pair.Q.q_root[i] * w[i];
  }
  return v;
}

CompareReport compare_levels(const AsymptoticPair& pair, double p, const DescentConfig& cfg) {
  auto resolvent = std::make_shared<const Resolvent>(pair.Q.Q.grid());
  const FunctionalContext ctx(resolvent, p, pair.Q);
  const FunctionalContext ctx_inf(resolvent, p, pair.Q_inf);

  CompareReport rep;
  rep.search_inf = multistart_search(ctx_inf, cfg);
  rep.search_Q = multistart_search(ctx, cfg);
  rep.c_est = rep.search_Q.level;
  rep.c_inf_est = rep.search_inf.level;
  rep.gap = rep.c_inf_est - rep.c_est;
  rep.distinct_Q = rep.search_Q.records.size();
  rep.distinct_inf = rep.search_inf.records.size();
  rep.converged_Q = static_cast<int>(rep.search_Q.converged.size());
  rep.converged_inf = static_cast<int>(rep.search_inf.converged.size());

  const Field& w = rep.search_inf.records.front().v_star;
  const Field v = transplant(pair, w);
  double defect = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double lhs = pair.Q.q_root[i] * v[i], rhs = pair.Q_inf.q_root[i] * w[i];
    defect = std::max(defect, std::abs(lhs - rhs));
    scale = std::max(scale, std::abs(rhs));
  }
  rep.transplant_defect = scale > 0.0 ? defect / scale : defect;

  const double tv = fibering_scale(ctx, v);
  rep.chain_Q = nehari_energy(ctx, v);
  rep.chain_inf_scaled = energy(ctx_inf, w * tv);
  rep.chain_inf = energy(ctx_inf, w);
  rep.transplant_check = rep.transplant_defect <= 1e-12 && rep.chain_Q <= rep.chain_inf_scaled + 1e-10 &&
                         rep.chain_inf_scaled <= rep.chain_inf + 1e-10;
  return rep;
}

}  // namespace helmdual

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "helmdual/functional.hpp"

namespace helmdual {

struct DescentConfig {
  double tol_residual = 1e-10;
  int max_iters = 2000;
  double armijo_c = 1e-4;
  double armijo_shrink = 0.5;
  double step_init = 1.0;
  double dedup_rel_threshold = 1e-2;
  int multistart_count = 20;
  std::uint64_t rng_seed = 1;
  double divergence_floor = -1e30;
  // Dual residual below which the curvature-corrected Newton step is tried.
  double newton_switch = 1e-2;
  int lanczos_steps = 40;
  bool keep_trajectory = false;

  void validate() const;
  friend bool operator==(const DescentConfig&, const DescentConfig&) = default;
};

enum class DescentStatus { Converged, Diverged, MaxIters };

struct SolutionRecord {
  Field v_star;
  Field u_star;
  double level = 0.0;
  double dual_residual = 0.0;
  double primal_residual = 0.0;
  int iterations = 0;
  Index3 orbit_shift{0, 0, 0};
  int sign = 1;
};

struct DescentOutcome {
  DescentStatus status = DescentStatus::MaxIters;
  SolutionRecord record;       // final iterate (not recentred)
  std::vector<double> energies;  // J after the projection and each accepted step
  std::vector<Field> trajectory; // filled when keep_trajectory is set
  int newton_steps = 0;
  int power_steps = 0;
  int duality_steps = 0;
};

// Duality map d = |g|^{p-2} g of the gradient g.
Field descent_direction(const FunctionalContext& ctx, const Field& v);

// Nehari-constrained monotone descent from v0; never throws on MaxIters or
// Diverged, only on inadmissible v0.
DescentOutcome descend(const FunctionalContext& ctx, const Field& v0, const DescentConfig& cfg);

// Like descend(), but throws MaxIters / Diverged unless the run converged.
SolutionRecord find_critical_point(const FunctionalContext& ctx, const Field& v0, const DescentConfig& cfg);

// min over lattice shifts y and signs of ‖v - (±w)(· - y)‖_{p'}.
double orbit_distance(const FunctionalContext& ctx, const Field& v, const Field& w);

// Seeded random trigonometric polynomial times a Gaussian envelope, redrawn
// until it lies in U+.
Field random_initial_field(const FunctionalContext& ctx, std::uint64_t seed);

// Shifts a converged record by whole periods so that its |v|^{p'} centroid
// sits near the box centre, and fixes the sign of its largest entry.
SolutionRecord recenter(const FunctionalContext& ctx, SolutionRecord rec);

struct StartResult {
  std::uint64_t seed = 0;
  DescentStatus status = DescentStatus::MaxIters;
  int iterations = 0;
  double level = 0.0;
  double dual_residual = 0.0;
  std::vector<double> energies;
  std::vector<Field> trajectory;
};

struct MultistartResult {
  std::vector<SolutionRecord> records;  // distinct, sorted by (level, hash)
  double level = 0.0;                   // minimum level found
  std::vector<StartResult> starts;      // per start, in seed order
  std::vector<SolutionRecord> converged;  // every converged start, recentred
};

// Worker count from HELMDUAL_THREADS, capped by hardware concurrency.
int worker_count();

MultistartResult multistart_search(const FunctionalContext& ctx, const DescentConfig& cfg);

// Greedy orbit deduplication of records already sorted by level.
std::vector<SolutionRecord> deduplicate(const FunctionalContext& ctx, std::vector<SolutionRecord> records,
                                        double rel_threshold);

// ‖v‖_{p'}^{p'-1} <= max{1, C / (1/p' - 1/2)} for every iterate.
bool ps_boundedness_check(const FunctionalContext& ctx, const std::vector<Field>& iterates, double C);

// sup over iterates of max(2 J(v), ‖J'(v)‖_p).
double ps_constant(const FunctionalContext& ctx, const std::vector<Field>& iterates);

}  // namespace helmdual

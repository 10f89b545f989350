#pragma once

#include <functional>
#include <vector>

namespace helmdual::detail {

using Vec = std::vector<double>;
using LinearOp = std::function<void(const Vec& x, Vec& y)>;

double dot(const Vec& a, const Vec& b);

struct MinresResult {
  Vec x;
  int iterations = 0;
  double relative_residual = 0.0;
};

// Unpreconditioned MINRES for a symmetric (possibly indefinite) operator.
MinresResult minres(const LinearOp& A, const Vec& b, double rtol, int max_iters);

struct RitzPairs {
  std::vector<double> values;  // ascending
  std::vector<Vec> vectors;    // unit Euclidean norm
};

// `steps` Lanczos iterations with full reorthogonalisation from a fixed
// pseudo-random start; returns the `count` lowest Ritz pairs.
RitzPairs lanczos_lowest(const LinearOp& A, std::size_t dim, int steps, int count);

}  // namespace helmdual::detail

#include "krylov.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace helmdual::detail {

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

MinresResult minres(const LinearOp& A, const Vec& b, double rtol, int max_iters) {
  const std::size_t n = b.size();
  MinresResult res;
  res.x.assign(n, 0.0);
  const double beta1 = std::sqrt(dot(b, b));
  if (beta1 == 0.0) return res;

  Vec r1 = b, r2 = b, y = b, v(n), w(n, 0.0), w1(n), w2(n, 0.0);
  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
  double cs = -1.0, sn = 0.0;
  const double tiny = std::numeric_limits<double>::epsilon();

  for (int it = 1; it <= max_iters; ++it) {
    const double s = 1.0 / beta;
    for (std::size_t i = 0; i < n; ++i) v[i] = s * y[i];
    A(v, y);
    if (it >= 2)
      for (std::size_t i = 0; i < n; ++i) y[i] -= (beta / oldb) * r1[i];
    const double alfa = dot(v, y);
    for (std::size_t i = 0; i < n; ++i) y[i] -= (alfa / beta) * r2[i];
    r1.swap(r2);
    r2 = y;
    oldb = beta;
    beta = std::sqrt(dot(y, y));

    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    const double gamma = std::max(std::hypot(gbar, beta), tiny);
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar *= sn;

    w1.swap(w2);
    w2.swap(w);
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) / gamma;
      res.x[i] += phi * w[i];
    }
    res.iterations = it;
    res.relative_residual = phibar / beta1;
    if (res.relative_residual < rtol || beta == 0.0) break;
  }
  return res;
}

RitzPairs lanczos_lowest(const LinearOp& A, std::size_t dim, int steps, int count) {
  steps = std::min<int>(steps, static_cast<int>(dim));
  std::vector<Vec> V;
  V.reserve(steps);
  std::vector<double> alpha, beta;

  Vec q(dim);
  std::uint64_t state = 0x9E3779B97F4A7C15ULL;
  for (auto& x : q) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    x = static_cast<double>(z >> 11) * 0x1.0p-53 - 0.5;
  }
  double nq = std::sqrt(dot(q, q));
  for (auto& x : q) x /= nq;

  Vec w(dim);
  for (int j = 0; j < steps; ++j) {
    V.push_back(q);
    A(q, w);
    const double a = dot(q, w);
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& u : V) {
        const double c = dot(u, w);
        for (std::size_t i = 0; i < dim; ++i) w[i] -= c * u[i];
      }
    const double b = std::sqrt(dot(w, w));
    if (j + 1 == steps || b < 1e-14 * std::abs(a) + 1e-300) break;
    beta.push_back(b);
    for (std::size_t i = 0; i < dim; ++i) q[i] = w[i] / b;
  }

  const int m = static_cast<int>(alpha.size());
  Eigen::VectorXd diag(m), sub(std::max(m - 1, 0));
  for (int i = 0; i < m; ++i) diag[i] = alpha[i];
  for (int i = 0; i + 1 < m; ++i) sub[i] = beta[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);

  RitzPairs out;
  const int k = std::min(count, m);
  for (int e = 0; e < k; ++e) {
    out.values.push_back(es.eigenvalues()[e]);
    Vec x(dim, 0.0);
    for (int j = 0; j < m; ++j) {
      const double c = es.eigenvectors()(j, e);
      for (std::size_t i = 0; i < dim; ++i) x[i] += c * V[j][i];
    }
    const double nx = std::sqrt(dot(x, x));
    for (auto& xi : x) xi /= nx;
    out.vectors.push_back(std::move(x));
  }
  return out;
}

}  // namespace helmdual::detail

#include <doctest.h>

#include "helmdual/asymptotic.hpp"
#include "helmdual/error.hpp"
#include "helmdual/farfield.hpp"
#include "support.hpp"

using namespace test;

namespace {

using cd = std::complex<double>;

FunctionalContext bump_context(const GridSpec& g, double p, const BumpDescriptor& b) {
  return FunctionalContext(g, p, Coefficient::make(sample_bump(g, b), p, false));
}

Field ones(const GridSpec& g) {
  Field f(g);
  for (double& x : f.values()) x = 1.0;
  return f;
}

// Transform of a radial profile at |ξ| = 1, by 1D quadrature of the Hankel form:
// N = 2: 2π ∫ q(r) J0(r) r dr, N = 3: 4π ∫ q(r) sin(r)/r r² dr.
double radial_transform(const BumpDescriptor& b, int N) {
  auto q = [&](double r) { return b(Point3{b.center[0] + r, b.center[1], b.center[2]}, N); };
  if (N == 2)
    return 2.0 * kPi * simpson([&](double r) { return q(r) * std::cyl_bessel_j(0.0, r) * r; }, 0.0, b.radius, 4000);
  return 4.0 * kPi * simpson([&](double r) { return q(r) * std::sin(r) * r; }, 0.0, b.radius, 4000);
}

}  // namespace

TEST_SUITE("farfield") {
  TEST_CASE("sphere grid") {
    const SphereSamples s = sphere_grid(3, 8, 16, {1.0, 2.0, 3.0});
    REQUIRE(s.directions.size() == 128);
    for (std::size_t i = 0; i < s.directions.size(); ++i) {
      const Point3& a = s.directions[i];
      CHECK(std::abs(std::hypot(a[0], a[1], a[2]) - 1.0) <= 1e-12);
      const Point3& b = s.directions[s.antipode(i)];
      for (int d = 0; d < 3; ++d) CHECK(std::abs(a[d] + b[d]) <= 1e-15);
    }
    const SphereSamples s2 = sphere_grid(2, 8, 12, {0.0, 0.0, 0.0});
    CHECK(s2.n_theta == 1);
    CHECK(s2.directions.size() == 12);
    CHECK_THROWS_AS(sphere_grid(3, 4, 7, {}), Error);
    CHECK_THROWS_AS(sphere_grid(4, 4, 8, {}), Error);
  }

  TEST_CASE("zero field") {
    const GridSpec g{3, 40.0, 32, 0.3};
    const BumpDescriptor b{{20, 20, 20}, 2.0, 1.0};
    const auto ctx = bump_context(g, 5.0, b);
    const SphereSamples s = farfield_amplitude(ctx, Field(g), sphere_grid(3, 4, 8, b.center));
    for (const cd& v : s.values) CHECK(v == cd(0.0, 0.0));
    const FarfieldReport rep = decay_and_expansion_check(ctx, Field(g), s, FarfieldOptions{});
    CHECK(rep.degenerate);
  }

  TEST_CASE("conjugate antisymmetry for real fields") {
    const GridSpec g{3, 40.0, 32, 0.3};
    const BumpDescriptor b{{19.0, 21.0, 20.5}, 3.0, 1.0};
    const auto ctx = bump_context(g, 5.0, b);
    std::mt19937_64 rng(6);
    const Field u = random_field(g, rng);
    const SphereSamples s = farfield_amplitude(ctx, u, sphere_grid(3, 6, 12, {20.0, 20.0, 20.0}));
    double scale = 0.0;
    for (const cd& v : s.values) scale = std::max(scale, std::abs(v));
    REQUIRE(scale > 0.0);
    for (std::size_t i = 0; i < s.values.size(); ++i)
      CHECK(std::abs(s.values[s.antipode(i)] + std::conj(s.values[i])) <= 1e-12 * scale);
  }

  TEST_CASE("radial source against the Hankel-transform oracle") {
    // The C^∞ bump has slowly decaying spectrum, so the match improves with n.
    auto rel_err = [](int N, int n) {
      const GridSpec g{N, 24.0, n, 0.3};
      const BumpDescriptor b{{12.0, 12.0, N == 3 ? 12.0 : 0.0}, 5.0, 1.0};
      const auto ctx = bump_context(g, N == 2 ? 7.0 : 5.0, b);
      // u ≡ 1 makes the source equal to Q itself.
      const SphereSamples s = farfield_amplitude(ctx, ones(g), sphere_grid(N, 4, 8, b.center));
      const cd expected = cd(0.0, -0.25) * std::pow(2.0 * kPi, -0.5 * (N - 2)) * std::pow(2.0 * kPi, -0.5 * N) *
                          radial_transform(b, N);
      double worst = 0.0;
      for (const cd& v : s.values) worst = std::max(worst, std::abs(v - expected));
      return worst / std::abs(expected);
    };
    const double e2c = rel_err(2, 64), e2f = rel_err(2, 128);
    CHECK(e2f <= 5e-6);
    CHECK(e2c / e2f > 50.0);
    const double e3c = rel_err(3, 48), e3f = rel_err(3, 96);
    CHECK(e3f <= 5e-6);
    CHECK(e3c / e3f > 50.0);
  }

  TEST_CASE("origin shift multiplies by a phase") {
    const GridSpec g{2, 24.0, 96, 0.3};
    const BumpDescriptor b{{12.0, 12.0, 0.0}, 5.0, 1.0};
    const auto ctx = bump_context(g, 7.0, b);
    const Point3 o{12.0, 12.0, 0.0}, o2{13.0, 11.5, 0.0};
    const SphereSamples a = farfield_amplitude(ctx, ones(g), sphere_grid(2, 1, 16, o));
    const SphereSamples c = farfield_amplitude(ctx, ones(g), sphere_grid(2, 1, 16, o2));
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      const Point3& xi = a.directions[i];
      const cd rot = std::polar(1.0, xi[0] * (o2[0] - o[0]) + xi[1] * (o2[1] - o[1]));
      CHECK(std::abs(c.values[i] - a.values[i] * rot) <= 1e-12 * std::abs(a.values[i]));
    }
  }

  TEST_CASE("interpolation reproduces nodes and constants") {
    SphereSamples s = sphere_grid(3, 6, 12, {});
    for (std::size_t i = 0; i < s.values.size(); ++i) s.values[i] = cd(static_cast<double>(i), -0.5 * i);
    for (std::size_t i = 0; i < s.values.size(); ++i)
      CHECK(std::abs(interpolate_amplitude(s, s.directions[i]) - s.values[i]) <= 1e-12 * (1.0 + i));
    for (cd& v : s.values) v = cd(0.3, -0.2);
    CHECK(std::abs(interpolate_amplitude(s, {0.0, 0.0, 1.0}) - cd(0.3, -0.2)) <= 1e-15);
    CHECK(std::abs(interpolate_amplitude(s, {0.6, -0.8, 0.0}) - cd(0.3, -0.2)) <= 1e-15);
  }

  TEST_CASE("decay exponent of the fundamental solution") {
    const GridSpec g{3, 40.0, 64, 0.0};
    const Point3 c{20.0, 20.0, 20.0};
    const Field u = Field::from_function(g, [&](const Point3& x) {
      const double r = std::hypot(x[0] - c[0], x[1] - c[1], x[2] - c[2]);
      return r > 0.0 ? fundamental_solution_psi(r, 3) : 0.0;
    });
    const auto ctx = bump_context(g, 5.0, BumpDescriptor{c, 2.0, 1.0});
    const FarfieldReport rep = decay_and_expansion_check(ctx, u, sphere_grid(3, 4, 8, c), FarfieldOptions{});
    CHECK(rep.damping == 0.0);
    CHECK(rep.target_exponent == 1.0);
    CHECK(rep.decay_exponent == doctest::Approx(1.0).epsilon(0.15));
    CHECK(rep.shells.size() >= 3);
  }

  TEST_CASE("field built from the expansion has no error outside the core") {
    for (double eps : {0.0, 0.3}) {
      CAPTURE(eps);
      const GridSpec g{3, 40.0, 48, eps};
      const Point3 c{20.0, 20.0, 20.0};
      const cd amp(0.3, -0.2);
      const cd kappa = std::sqrt(cd(1.0, eps));
      SphereSamples s = sphere_grid(3, 8, 16, c);
      for (cd& v : s.values) v = amp;
      const FarfieldOptions opt;
      const Field u = Field::from_function(g, [&](const Point3& x) {
        const double r = std::hypot(x[0] - c[0], x[1] - c[1], x[2] - c[2]);
        if (r < opt.inner_radius) return 1.0;
        return -2.0 * (2.0 * kPi / r) * (std::exp(cd(0.0, 1.0) * kappa * r - cd(0.0, 0.5 * kPi)) * amp).real();
      });
      const auto ctx = bump_context(g, 5.0, BumpDescriptor{c, 2.0, 1.0});
      const FarfieldReport rep = decay_and_expansion_check(ctx, u, s, opt);
      REQUIRE(rep.expansion.size() >= 3);
      // Only the unit core contributes: error(R) = |core| / R.
      double core = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        const Point3 x = coordinates(g, i);
        if (std::hypot(x[0] - c[0], x[1] - c[1], x[2] - c[2]) < opt.inner_radius) core += g.cell_volume();
      }
      for (const ExpansionRow& row : rep.expansion) CHECK(row.error * row.R == doctest::Approx(core).epsilon(1e-12));
      CHECK(rep.tail_nonincreasing);
      CHECK(rep.monotone);
      // The synthetic field decays exactly like e^{-Im κ r}/r.
      CHECK(rep.decay_exponent == doctest::Approx(1.0).epsilon(0.15));
    }
  }

  TEST_CASE("expansion error tracks a wrong amplitude") {
    const GridSpec g{3, 40.0, 48, 0.0};
    const Point3 c{20.0, 20.0, 20.0};
    SphereSamples s = sphere_grid(3, 8, 16, c);
    for (cd& v : s.values) v = cd(0.3, 0.0);
    const Field u = Field::from_function(g, [&](const Point3& x) {
      const double r = std::hypot(x[0] - c[0], x[1] - c[1], x[2] - c[2]);
      return r < 2.0 ? 0.0 : -2.0 * (2.0 * kPi / r) * 0.6 * std::sin(r);
    });
    const auto ctx = bump_context(g, 5.0, BumpDescriptor{c, 2.0, 1.0});
    const FarfieldReport rep = decay_and_expansion_check(ctx, u, s, FarfieldOptions{});
    // Residual is half of u, whose square integrates to ~ (4π)²·0.36·R·2π/2 over B_R.
    for (const ExpansionRow& row : rep.expansion) CHECK(row.error > 1.0);
  }

  TEST_CASE("degenerate configurations") {
    const BumpDescriptor b{{3.0, 3.0, 0.0}, 1.0, 1.0};
    const GridSpec small{2, 6.0, 32, 0.3};
    const auto ctx = bump_context(small, 7.0, b);
    std::mt19937_64 rng(1);
    const Field u = random_field(small, rng);
    try {
      farfield_amplitude(ctx, u, sphere_grid(2, 1, 8, b.center));
      FAIL("expected InterpolationDegenerate");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InterpolationDegenerate);
    }
    const GridSpec coarse{2, 20.0, 8, 0.3};
    const auto ctx2 = bump_context(coarse, 7.0, BumpDescriptor{{10.0, 10.0, 0.0}, 2.0, 1.0});
    CHECK_THROWS_AS(farfield_amplitude(ctx2, ones(coarse), sphere_grid(2, 1, 8, {10, 10, 0})), Error);
    try {
      decay_and_expansion_check(ctx, u, sphere_grid(2, 1, 8, b.center), FarfieldOptions{});
      FAIL("expected InsufficientShells");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InsufficientShells);
    }
  }
}

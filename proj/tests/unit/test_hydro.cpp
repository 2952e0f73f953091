#include <doctest.h>

#include <numbers>

#include "bohmflow/hydro.hpp"
#include "bohmflow/potentials.hpp"
#include "bohmflow/propagator.hpp"
#include "helpers.hpp"

using namespace bohmflow;

namespace {

const Grid2D kGrid(128, 128, -10.0, 10.0, -10.0, 10.0);

bool interior(const Grid2D& g, std::size_t i, std::size_t j, double r) {
  return std::hypot(g.x(i), g.y(j)) < r;
}

}  // namespace

TEST_CASE("modulated plane wave moves with hbar k / m") {
  // wave numbers that fit the periodic box
  const double m = 2.0, kx = 2 * std::numbers::pi * 5 / 20.0, ky = -2 * std::numbers::pi * 2 / 20.0;
  const auto psi = testing::sampled(kGrid, m, [&](double x, double y) {
    return std::exp(-(x * x + y * y) / 4.0) * std::exp(cplx(0, kx * x + ky * y));
  });
  const auto f = hydro_fields(psi);
  double err = 0.0;
  std::size_t checked = 0;
  for (std::size_t i = 0; i < kGrid.size(); ++i) {
    if (f.velocity.masked[i]) continue;
    CHECK(f.flux.x[i] == doctest::Approx(f.rho[i] * f.velocity.x[i]).epsilon(1e-9));
    if (!interior(kGrid, i / kGrid.ny(), i % kGrid.ny(), 5.0)) continue;
    err = std::max({err, std::abs(f.velocity.x[i] - kx / m), std::abs(f.velocity.y[i] - ky / m)});
    ++checked;
  }
  CHECK(checked > 1000);
  CHECK(err < 1e-8);
}

TEST_CASE("quantum potential and pressure of a Gaussian") {
  const double m = 1.5, s2 = 1.0;  // sigma^2 of |psi|^2
  const auto psi = testing::sampled(kGrid, m, [&](double x, double y) {
    return cplx(std::exp(-(x * x + y * y) / (4 * s2)), 0.0);
  });
  const auto f = hydro_fields(psi);
  double q_err = 0.0, p_err = 0.0;
  for (std::size_t i = 0; i < kGrid.nx(); ++i)
    for (std::size_t j = 0; j < kGrid.ny(); ++j) {
      if (!interior(kGrid, i, j, 5.0)) continue;
      const std::size_t k = kGrid.index(i, j);
      REQUIRE_FALSE(f.qpot.masked[k]);
      const double x = kGrid.x(i), y = kGrid.y(j);
      // -(1/2m) lap R / R with R = exp(-r^2 / 4 s2)
      const double q = -(1.0 / (2 * m)) * ((x * x + y * y) / (4 * s2 * s2) - 1.0 / s2);
      q_err = std::max(q_err, std::abs(f.qpot.values[k] - q));
      // P = -(1/4m) rho d d ln rho = rho / (4 m s2) * identity
      const double p = f.rho[k] / (4 * m * s2);
      p_err = std::max({p_err, std::abs(f.pressure.xx[k] - p), std::abs(f.pressure.yy[k] - p),
                        std::abs(f.pressure.xy[k])});
    }
  CHECK(q_err < 1e-9);
  CHECK(p_err < 1e-10);
}

TEST_CASE("pressure of a correlated Gaussian has the right off-diagonal") {
  const double a = 1.0, b = 0.3, c = 0.8, m = 1.0;
  // rho = exp(-(a x^2 + 2 b x y + c y^2)), so d d ln rho = -2 [[a, b], [b, c]]
  const auto psi = testing::sampled(kGrid, m, [&](double x, double y) {
    return cplx(std::exp(-(a * x * x + 2 * b * x * y + c * y * y) / 2.0), 0.0);
  });
  const auto P = pressure_tensor(psi);
  const auto rho = density(psi);
  double err = 0.0;
  for (std::size_t i = 0; i < kGrid.nx(); ++i)
    for (std::size_t j = 0; j < kGrid.ny(); ++j) {
      if (!interior(kGrid, i, j, 4.0)) continue;
      const std::size_t k = kGrid.index(i, j);
      const double r = rho[k] / (2 * m);
      err = std::max({err, std::abs(P.xx[k] - r * a), std::abs(P.xy[k] - r * b), std::abs(P.yy[k] - r * c)});
    }
  CHECK(err < 1e-10);
}

TEST_CASE("divergence of the pressure equals rho grad Q") {
  // an entangled, moving state so that nothing is trivially zero
  const Grid2D g(256, 256, -10.0, 10.0, -10.0, 10.0);
  const auto psi = testing::sampled(g, 1.0, [](double x, double y) {
    const double g1 = std::exp(-((x - 1) * (x - 1) + (y - 0.5) * (y - 0.5)) / 3.0);
    const double g2 = std::exp(-((x + 1) * (x + 1) + (y + 0.5) * (y + 0.5)) / 2.0);
    return g1 * std::exp(cplx(0, 0.7 * x)) + 0.6 * g2 * std::exp(cplx(0, -0.4 * y));
  });
  FieldCalculator calc(g);
  const auto f = calc.hydro(psi);
  const auto divx = calc.divergence({f.pressure.xx, f.pressure.xy});
  const auto divy = calc.divergence({f.pressure.xy, f.pressure.yy});
  // finite-difference gradient of Q on interior nodes (fourth order)
  const double h = g.dx();
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 2; i + 2 < g.nx(); ++i)
    for (std::size_t j = 2; j + 2 < g.ny(); ++j) {
      if (!interior(g, i, j, 3.0)) continue;
      auto Q = [&](std::size_t a, std::size_t b) { return f.qpot.values[g.index(a, b)]; };
      const double qx = (-Q(i + 2, j) + 8 * Q(i + 1, j) - 8 * Q(i - 1, j) + Q(i - 2, j)) / (12 * h);
      const double qy = (-Q(i, j + 2) + 8 * Q(i, j + 1) - 8 * Q(i, j - 1) + Q(i, j - 2)) / (12 * h);
      const std::size_t k = g.index(i, j);
      err = std::max({err, std::abs(divx[k] - f.rho[k] * qx), std::abs(divy[k] - f.rho[k] * qy)});
      scale = std::max(scale, std::abs(divx[k]));
    }
  CHECK(err < 1e-4 * scale);
}

TEST_CASE("harmonic ground state satisfies Q + V = E0") {
  const double m = 1.0, wx = 1.0, wy = 1.4;
  const auto V = PotentialSurface::harmonic2d(m * wx * wx, m * wy * wy);
  const auto psi = testing::sampled(kGrid, m, [&](double x, double y) {
    return cplx(std::exp(-m * (wx * x * x + wy * y * y) / (2 * kHbar)), 0.0);
  });
  const auto Q = quantum_potential(psi);
  const auto v = V.sample(kGrid);
  const double e0 = kHbar * (wx + wy) / 2;
  double err = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < kGrid.nx(); ++i)
    for (std::size_t j = 0; j < kGrid.ny(); ++j) {
      const std::size_t k = kGrid.index(i, j);
      if (Q.masked[k] || !interior(kGrid, i, j, 4.0)) continue;
      err = std::max(err, std::abs(Q.values[k] + v[k] - e0));
      ++n;
    }
  CHECK(n > 1000);
  CHECK(err < 1e-6);
}

TEST_CASE("low-density nodes are masked, not evaluated") {
  const auto psi = testing::sampled(kGrid, 1.0, [](double x, double y) {
    return cplx(std::exp(-(x * x + y * y) / 2.0), 0.0);
  });
  const auto f = hydro_fields(psi);
  const double peak = *std::max_element(f.rho.begin(), f.rho.end());
  std::size_t count = 0;
  for (std::size_t i = 0; i < kGrid.size(); ++i) {
    const bool low = f.rho[i] < kDensityFloor * peak;
    CHECK(static_cast<bool>(f.qpot.masked[i]) == low);
    CHECK(static_cast<bool>(f.velocity.masked[i]) == low);
    if (low) {
      CHECK(f.qpot.values[i] == 0.0);
      CHECK_FALSE(f.qpot.at(i).has_value());
      ++count;
    }
  }
  CHECK(count == f.qpot.masked_count);
  CHECK(count > 0);
}

TEST_CASE("continuity and Euler residuals vanish for propagated states") {
  const Grid2D g(64, 64, -8.0, 8.0, -8.0, 8.0);
  const auto V = PotentialSurface::harmonic2d(1.0, 2.0, 0.0, 0.0, 0.3);
  const double dt = 1e-3;
  auto psi0 = make_gaussian(g, {1.0, -0.5}, {0.8, 0.7}, {0.5, 0.2}, 1.0);
  SplitOperator op(g, V, 1.0, dt);
  WaveField a = psi0;
  for (int s = 0; s < 50; ++s) op.step(a);
  WaveField b = a;
  op.step(b);
  WaveField c = b;
  op.step(c);
  const double res = continuity_residual(a, b);
  const auto fb = hydro_fields(b);
  const double jscale = *std::max_element(fb.flux.x.begin(), fb.flux.x.end());
  CHECK(res < 1e-4 * jscale / g.dx());
  const auto grad = V.sample_gradient(g);
  const double er = euler_residual(a, b, c, grad);
  CHECK(er < 1e-3);
  CHECK_THROWS_AS(continuity_residual(b, a), ValidationError);
}

TEST_CASE("Q separability detects entanglement") {
  // roundoff in Q grows like kmax^2 / |psi| at the density floor, so the
  // grid resolves the packets without going finer than needed
  const Grid2D g(64, 64, -10.0, 10.0, -10.0, 10.0);
  const auto prod = testing::sampled(g, 1.0, [](double x, double y) {
    return std::exp(-x * x / 3.0 - (y - 1) * (y - 1) / 2.0) * std::exp(cplx(0, 0.3 * x));
  });
  CHECK(q_separability_residual(prod) < 1e-8);
  const auto ent = testing::sampled(g, 1.0, [](double x, double y) {
    return cplx(std::exp(-(x * x + y * y + 1.2 * x * y) / 3.0), 0.0);
  });
  CHECK(q_separability_residual(ent) > 1e-2);
}

#include <doctest.h>

#include <cmath>

#include "bohmflow/propagator.hpp"
#include "bohmflow/reduced.hpp"
#include "helpers.hpp"

using namespace bohmflow;

namespace {

const Grid2D kGrid(128, 64, -12, 12, -6, 6);

cplx gauss1d(double x, double x0, double s, double p) {
  return std::exp(-(x - x0) * (x - x0) / (4 * s * s)) * std::exp(cplx(0, p * x));
}

WaveField product_state(double m) {
  auto psi = testing::sampled(kGrid, m, [](double x, double y) {
    return gauss1d(x, -1.0, 1.0, 0.5) * gauss1d(y, 0.5, 0.6, -0.3);
  });
  psi.normalize();
  return psi;
}

WaveField entangled_state(double m) {
  auto psi = testing::sampled(kGrid, m, [](double x, double y) {
    return gauss1d(x, -2.0, 0.8, 0.6) * gauss1d(y, 1.0, 0.5, 0.0) +
           gauss1d(x, 2.0, 0.8, -0.6) * gauss1d(y, -1.0, 0.5, 0.0);
  });
  psi.normalize();
  return psi;
}

}  // namespace

TEST_CASE("reduced density of a product state is pure") {
  const auto psi = product_state(1.0);
  const auto r = partial_trace(psi, Axis::y);
  CHECK(r.size() == kGrid.nx());
  CHECK(r.trace() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(r.purity() - 1.0) < 1e-9);
  CHECK(r.hermiticity_error() < 1e-14);
  // the diagonal is the x marginal
  for (std::size_t i = 0; i < kGrid.nx(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < kGrid.ny(); ++j) s += std::norm(psi(i, j));
    CHECK(r.diagonal()[i] == doctest::Approx(s * kGrid.dy()).epsilon(1e-12));
  }
  const auto ry = partial_trace(psi, Axis::x);
  CHECK(ry.size() == kGrid.ny());
  CHECK(std::abs(ry.purity() - 1.0) < 1e-9);

  const auto ent = partial_trace(entangled_state(1.0), Axis::y);
  CHECK(ent.trace() == doctest::Approx(1.0).epsilon(1e-12));
  // psi = a b + c d with unit factors: the purity follows from the two
  // overlaps sx = <a|c>, sy = <b|d> alone
  auto overlap = [](std::size_t n, auto&& f, auto&& g) {
    cplx fg{};
    double ff = 0, gg = 0;
    for (std::size_t i = 0; i < n; ++i) {
      fg += std::conj(f(i)) * g(i);
      ff += std::norm(f(i));
      gg += std::norm(g(i));
    }
    return fg / std::sqrt(ff * gg);
  };
  const cplx sx = overlap(
      kGrid.nx(), [](std::size_t i) { return gauss1d(kGrid.x(i), -2.0, 0.8, 0.6); },
      [](std::size_t i) { return gauss1d(kGrid.x(i), 2.0, 0.8, -0.6); });
  const cplx sy = overlap(
      kGrid.ny(), [](std::size_t j) { return gauss1d(kGrid.y(j), 1.0, 0.5, 0.0); },
      [](std::size_t j) { return gauss1d(kGrid.y(j), -1.0, 0.5, 0.0); });
  const cplx q = sx * sy;
  const double num = 2 + 2 * (q * q).real() + 2 * std::norm(sx) + 2 * std::norm(sy) + 8 * q.real();
  const double den = std::pow(2 + 2 * q.real(), 2);
  CHECK(ent.purity() == doctest::Approx(num / den).epsilon(1e-10));
  CHECK(ent.purity() < 0.6);
}

TEST_CASE("reduced current from the density matrix matches the direct sum") {
  const auto psi = entangled_state(1.3);
  const auto r = partial_trace(psi);
  const auto rv = reduced_velocity(r);
  const auto j = reduced_current_direct(psi);
  double scale = 0.0, err = 0.0;
  for (std::size_t i = 0; i < j.size(); ++i) {
    scale = std::max(scale, std::abs(j[i]));
    if (!rv.masked[i]) err = std::max(err, std::abs(rv.v[i] * rv.diagonal[i] - j[i]));
  }
  CHECK(scale > 0.1);
  CHECK(err < 1e-12 * std::max(1.0, scale));
}

TEST_CASE("retained axis size is capped") {
  const Grid2D wide(1024, 8, -10, 10, -1, 1);
  const WaveField psi(wide, std::vector<cplx>(wide.size(), cplx(1.0, 0.0)), 1.0);
  CHECK_THROWS_AS(partial_trace(psi, Axis::y), ValidationError);
  CHECK_NOTHROW(partial_trace(psi, Axis::x));
}

TEST_CASE("reduced trajectories of a product state are the 1D Bohmian trajectories") {
  const double m = 1.0, kx = 0.3, ky = 1.0, dt = 0.01;
  const auto V = PotentialSurface::harmonic2d(kx, ky);
  WaveField psi = product_state(m);
  SplitOperator op(kGrid, V, m, dt);

  const Grid1D gx = x_axis(kGrid);
  auto psi1 = testing::sampled1d(gx, m, [](double x) { return gauss1d(x, -1.0, 1.0, 0.5); });
  psi1.normalize();
  SplitOperator1D op1(gx, m, dt);
  std::vector<double> vx(gx.size());
  for (std::size_t i = 0; i < gx.size(); ++i) vx[i] = 0.5 * kx * gx.x(i) * gx.x(i);
  op1.set_potential(vx);

  std::vector<ReducedVelocity> reduced;
  std::vector<VelocitySnapshot1D> direct;
  std::vector<ReducedDensity> traces;
  for (int s = 0; s <= 200; ++s) {
    if (s > 0) {
      op.step(psi);
      op1.step(psi1);
    }
    const auto r = partial_trace(psi);
    reduced.push_back(reduced_velocity(r));
    direct.push_back(velocity_1d(psi1, op1.fft()));
    if (s % 50 == 0) {
      CHECK(std::abs(r.trace() - 1.0) < 1e-9);
      CHECK(std::abs(r.purity() - 1.0) < 1e-9);
      traces.push_back(r);
    }
  }
  const std::vector<double> x0{-3.0, -2.0, -1.5, -1.0, -0.4, 0.0, 0.7, 1.5};
  const auto a = integrate_reduced(x0, reduced);
  const auto b = integrate_1d(x0, direct);
  REQUIRE(a.times.size() == b.times.size());
  CHECK(a.masked_count() == 0);
  double err = 0.0, moved = 0.0;
  for (std::size_t f = 0; f < a.times.size(); ++f)
    for (std::size_t k = 0; k < x0.size(); ++k) {
      err = std::max(err, std::abs(a.at(f, k) - b.at(f, k)));
      moved = std::max(moved, std::abs(a.at(f, k) - x0[k]));
    }
  CHECK(moved > 0.5);
  CHECK(err < 1e-6);
}

TEST_CASE("reduced continuity residual falls at second order in dt") {
  const double m = 1.0;
  const auto V = PotentialSurface::harmonic2d(0.5, 1.0, 0.0, 0.0, 0.3);
  auto residual = [&](double dt) {
    WaveField psi = entangled_state(m);
    SplitOperator op(kGrid, V, m, dt / 8);
    // same start time t = 0.2 for every dt
    const int n0 = static_cast<int>(std::lround(0.2 / (dt / 8)));
    for (int s = 0; s < n0; ++s) op.step(psi);
    const auto r0 = partial_trace(psi);
    for (int s = 0; s < 8; ++s) op.step(psi);
    return reduced_continuity_residual(r0, partial_trace(psi));
  };
  const double coarse = residual(0.04), fine = residual(0.02);
  CHECK(fine < coarse);
  CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.2));

  const auto r = partial_trace(product_state(m));
  CHECK_THROWS_AS(reduced_continuity_residual(r, r), ValidationError);
}

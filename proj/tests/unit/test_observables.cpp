#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bohmflow/observables.hpp"
#include "bohmflow/propagator.hpp"
#include "helpers.hpp"

using namespace bohmflow;

namespace {

// probability that a normal(c, s) variable exceeds b
double tail(double b, double c, double s) { return 0.5 * std::erfc((b - c) / (std::sqrt(2.0) * s)); }

TrajectoryEnsemble hand_ensemble(const std::vector<std::vector<Vec2>>& frames, std::vector<std::int64_t> masked) {
  TrajectoryEnsemble e;
  e.n = masked.size();
  e.masked_at = std::move(masked);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    e.times.push_back(static_cast<double>(f));
    for (const auto& p : frames[f]) e.positions.push_back(p);
  }
  return e;
}

}  // namespace

TEST_CASE("restricted norm of a Gaussian against the error function") {
  const Grid2D g(256, 256, -10, 10, -10, 10);
  const double sx = 1.2, sy = 0.9;
  const auto psi = make_gaussian(g, {0.5, -0.3}, {sx, sy}, {1.0, 0.0}, 1.0);
  // a cut halfway between nodes makes node membership the midpoint rule,
  // whose error is about h^2/24 times the density slope at the cut
  const double b = g.x(140) - 0.5 * g.dx();
  const RegionSpec right{RegionKind::half_plane_x_positive, 0.0, b};
  CHECK(std::abs(restricted_norm(psi, right) - tail(b, 0.5, sx)) < 1e-4);
  const double c = g.y(120) - 0.5 * g.dy();
  const RegionSpec above{RegionKind::half_plane_above_line, 0.0, c};
  CHECK(std::abs(restricted_norm(psi, above) - tail(c, -0.3, sy)) < 1e-4);

  // tilted line: the signed distance along the normal is normal with the
  // variance projected on that normal
  const double a = 0.8, bb = 0.4;
  const double len = std::hypot(a, 1.0);
  const double mean = (-0.3 - a * 0.5 - bb) / len;
  const double s = std::sqrt(a * a * sx * sx + sy * sy) / len;
  const RegionSpec tilted{RegionKind::half_plane_above_line, a, bb};
  CHECK(restricted_norm(psi, tilted) == doctest::Approx(tail(0.0, mean, s)).epsilon(5e-3));
  CHECK(tilted.contains(0.0, 0.5));
  CHECK_FALSE(tilted.contains(0.0, 0.3));
}

TEST_CASE("fractions skip masked trajectories and remember past visits") {
  const RegionSpec right{RegionKind::half_plane_x_positive, 0.0, 0.0};
  const auto e = hand_ensemble({{{-1, 0}, {-1, 0}, {5, 5}, {-2, 0}},
                                {{1, 0}, {-1, 0}, {5, 5}, {2, 0}},
                                {{-1, 0}, {-1, 0}, {5, 5}, {3, 0}}},
                               {-1, -1, 1, -1});
  const std::vector<double> P{0.1, 0.2, 0.3};
  const auto s = fraction_series(e, right, P);
  CHECK(s.n_used == 3);
  CHECK(s.n_masked == 1);
  REQUIRE(s.W.size() == 3);
  CHECK(s.W[0] == doctest::Approx(0.0));
  CHECK(s.W[1] == doctest::Approx(2.0 / 3));
  CHECK(s.W[2] == doctest::Approx(1.0 / 3));
  CHECK(s.W_bar[0] == doctest::Approx(0.0));
  CHECK(s.W_bar[1] == doctest::Approx(2.0 / 3));
  // trajectory 0 has left, but it was inside once
  CHECK(s.W_bar[2] == doctest::Approx(2.0 / 3));
  CHECK(s.P == P);
  for (std::size_t f = 0; f < 3; ++f) CHECK(s.W_bar[f] >= s.W[f]);

  const std::vector<double> short_p{0.1};
  CHECK_THROWS_AS(fraction_series(e, right, short_p), ValidationError);

}

TEST_CASE("ensemble energies on a harmonic surface") {
  const Grid2D g(128, 128, -10, 10, -10, 10);
  const double m = 2.0, kx = 0.5, ky = 1.5;
  const auto V = PotentialSurface::harmonic2d(kx, ky);
  const GaussianPacket packet{{0.7, -0.4}, {0.8, 0.6}, {1.2, -0.5}};
  const auto psi = make_gaussian(g, packet.center, packet.widths, packet.momenta, m);
  const auto terms = gaussian_energy_terms(psi, packet, V);
  CHECK(terms.translational == doctest::Approx((1.44 + 0.25) / (2 * m)));
  const double vbar = 0.5 * kx * (0.64 + 0.49) + 0.5 * ky * (0.36 + 0.16);
  CHECK(terms.v_bar == doctest::Approx(vbar).epsilon(1e-10));
  const double delta = 1.0 / (8 * m) * (1 / 0.64 + 1 / 0.36);
  CHECK(terms.delta_bar == doctest::Approx(delta));
  // the quantum energy of a Gaussian is the sum of all three terms
  CHECK(mean_energy(psi, V) == doctest::Approx(terms.translational + terms.v_bar + terms.delta_bar).epsilon(1e-10));

  const auto w = sample({SamplingKind::classical_wigner, 20000, 3}, packet);
  const auto ew = mean_energy(w, V, m);
  CHECK(std::abs(ew.mean - (terms.translational + terms.v_bar + terms.delta_bar)) < 3 * ew.std_error);
  const auto r = sample({SamplingKind::classical_rho0, 20000, 3}, packet);
  const auto er = mean_energy(r, V, m);
  CHECK(er.kinetic == doctest::Approx(terms.translational).epsilon(1e-12));
  CHECK(std::abs(er.mean - (terms.translational + terms.v_bar)) < 3 * er.std_error);

  InitialConditions two{{{0, 0}, {1, 0}}, {{2, 0}, {0, 0}}};
  const auto e2 = mean_energy(two, V, m);
  // energies 1 and 0.25
  CHECK(e2.mean == doctest::Approx(0.625));
  CHECK(e2.std_error == doctest::Approx(0.375));
  CHECK_THROWS_AS(mean_energy(InitialConditions{}, V, m), ValidationError);
}

TEST_CASE("angular bins split contributions on an edge") {
  const AngularSpec spec{{0.0, 0.0}, 1.0, 1.0};
  // one straight ahead (edge between bins at -0.5 and 0.5), one at 30.2
  // degrees, one behind the threshold, one masked
  const double t = 30.2 * std::numbers::pi / 180;
  const auto e = hand_ensemble({{{2, 0}, {2 * std::cos(t), 2 * std::sin(t)}, {0.5, 0}, {3, 0}}}, {-1, -1, -1, 0});
  const auto d = angular_distribution(e, spec);
  REQUIRE(d.theta_deg.size() == 180);
  CHECK(d.total == doctest::Approx(2.0));
  CHECK(d.theta_deg[89] == doctest::Approx(-0.5));
  CHECK(d.intensity[89] == doctest::Approx(0.25));
  CHECK(d.intensity[90] == doctest::Approx(0.25));
  CHECK(d.intensity[120] == doctest::Approx(0.5));
  CHECK(d.theta_deg[120] == doctest::Approx(30.5));

  CHECK_THROWS_AS(angular_distribution(e, AngularSpec{{0, 0}, 0.0, 7.0}), ValidationError);
  const auto none = hand_ensemble({{{-1, 0}}}, {-1});
  CHECK(angular_distribution(none, spec).empty);
  CHECK_THROWS_AS(fit_fringes(angular_distribution(none, spec)), SimulationError);
}

TEST_CASE("field angular total is the transmitted probability") {
  const Grid2D g(128, 128, -10, 10, -10, 10);
  const auto psi = make_gaussian(g, {4.0, 1.0}, {0.7, 0.7}, {0, 0}, 1.0);
  const AngularSpec spec{{0.0, 0.0}, 2.0, 2.0};
  const auto d = angular_distribution(psi, spec);
  const RegionSpec beyond{RegionKind::half_plane_x_positive, 0.0, 2.0};
  CHECK(d.total == doctest::Approx(restricted_norm(psi, beyond)).epsilon(1e-12));
  double mean = 0.0;
  for (std::size_t k = 0; k < d.intensity.size(); ++k) mean += d.intensity[k] * d.theta_deg[k];
  CHECK(mean > 5.0);
  CHECK(mean < 25.0);
}

TEST_CASE("fringe fit recovers the spacing of a two-slit pattern") {
  AngularDistribution d;
  d.bin_width_deg = 0.5;
  const double spacing = 0.15;  // lambda / d
  for (int k = 0; k < 360; ++k) {
    const double th = -90.0 + (k + 0.5) * 0.5;
    const double s = std::sin(th * std::numbers::pi / 180);
    d.theta_deg.push_back(th);
    d.intensity.push_back(std::pow(std::cos(std::numbers::pi * s / spacing), 2) * std::exp(-s * s / 0.2));
  }
  d.total = 1.0;
  d.empty = false;
  const auto fit = fit_fringes(d, 0.05);
  CHECK(fit.spacing == doctest::Approx(spacing).epsilon(0.01));
  REQUIRE(fit.order.size() >= 5);
  // ordered outward from the central maximum
  for (std::size_t k = 1; k < fit.order.size(); ++k) CHECK(fit.order[k] == fit.order[k - 1] + 1);
  bool has_zero = false;
  for (int o : fit.order) has_zero |= o == 0;
  CHECK(has_zero);
}

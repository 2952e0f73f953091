#pragma once

// Reaction and scattering observables: restricted norm over a product
// region, crossed / ever-crossed trajectory fractions, ensemble and quantum
// mean energies, angular intensity distributions and fringe spacing.

#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bohmflow/potentials.hpp"
#include "bohmflow/trajectories.hpp"
#include "bohmflow/wavefield.hpp"

namespace bohmflow {

enum class RegionKind { half_plane_above_line, half_plane_x_positive };

std::string_view region_kind_name(RegionKind k) noexcept;
RegionKind parse_region_kind(std::string_view name);

/// above line: y > a x + b.  x positive: x > b (a unused).
struct RegionSpec {
  RegionKind kind = RegionKind::half_plane_above_line;
  double a = 0.0;
  double b = 0.0;

  bool contains(double x, double y) const noexcept {
    return kind == RegionKind::half_plane_above_line ? y > a * x + b : x > b;
  }
};

/// Grid quadrature of |psi|^2 over the region, node (cell-centre) membership.
double restricted_norm(const WaveField& psi, const RegionSpec& region);

struct FractionSeries {
  std::vector<double> times;
  std::vector<double> W;      // fraction inside the region now
  std::vector<double> W_bar;  // fraction that has been inside at any frame so far
  std::vector<double> P;      // restricted norm at the same times; may be empty
  std::size_t n_used = 0;
  std::size_t n_masked = 0;
};

/// Masked trajectories are left out of numerator and denominator at every
/// frame. `P` (if non-empty) must have one entry per frame.
FractionSeries fraction_series(const TrajectoryEnsemble& e, const RegionSpec& region,
                               std::span<const double> P = {});

/// Columns t, W, W_bar, P (P empty when not available).
void write_fraction_csv(const std::filesystem::path& path, const FractionSeries& s);

struct EnergyEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
};

/// Ensemble average of p^2/2m + V(x) over the initial conditions.
EnergyEstimate mean_energy(const InitialConditions& ic, const PotentialSurface& v, double mass);
/// <psi|H|psi> by spectral kinetic quadrature.
double mean_energy(const WaveField& psi, const PotentialSurface& v);

/// The three terms of the classical mean energy of a Gaussian packet:
/// translational |p|^2/2m, the packet-averaged potential V_bar and the
/// internal energy delta_bar = hbar^2/8m (1/sx^2 + 1/sy^2).
struct GaussianEnergyTerms {
  double translational = 0.0;
  double v_bar = 0.0;
  double delta_bar = 0.0;
};
GaussianEnergyTerms gaussian_energy_terms(const WaveField& psi0, const GaussianPacket& packet,
                                          const PotentialSurface& v);

struct AngularDistribution {
  double bin_width_deg = 1.0;
  std::vector<double> theta_deg;  // bin centres
  std::vector<double> intensity;  // normalized to unit sum
  /// Unnormalized total: transmitted probability (fields) or count (ensembles).
  double total = 0.0;
  bool empty = true;
};

struct AngularSpec {
  Vec2 origin{0.0, 0.0};
  double x_threshold = 0.0;  // only x - origin.x > x_threshold contributes
  double bin_width_deg = 1.0;
};

/// Bins span [-90, 90] degrees. A contribution that falls exactly on a bin
/// edge is split equally between the two neighbouring bins.
AngularDistribution angular_distribution(const WaveField& psi, const AngularSpec& spec);
/// Final-frame positions of the usable trajectories.
AngularDistribution angular_distribution(const TrajectoryEnsemble& e, const AngularSpec& spec);

void write_angular_csv(const std::filesystem::path& path, const AngularDistribution& d);

struct FringeFit {
  std::vector<double> sin_theta;  // refined maxima, ascending
  std::vector<int> order;
  double spacing = 0.0;  // least-squares slope of sin(theta) against order
};

/// Local maxima above `min_relative` of the peak, refined by a parabola
/// through the neighbouring bins, ordered outward from the one closest to
/// theta = 0. Throws SimulationError if fewer than two maxima are found.
FringeFit fit_fringes(const AngularDistribution& d, double min_relative = 0.05);

}  // namespace bohmflow

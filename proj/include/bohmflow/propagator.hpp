#pragma once

// Strang-split spectral propagation of the time-dependent Schroedinger
// equation on the periodic grid, and the initial-state builders.
//
//   psi(t+dt) = e^{-iV dt/2} F^-1 e^{-i k^2 dt/2m} F e^{-iV dt/2} psi(t)
//
// An optional absorber damps the wave in a band along the grid edges after
// every step.

#include <array>
#include <optional>
#include <vector>

#include "bohmflow/potentials.hpp"
#include "bohmflow/spectral.hpp"
#include "bohmflow/wavefield.hpp"

namespace bohmflow {

/// Per-step multiplicative mask 1 - strength * sin^2(pi u / 2), u in [0, 1]
/// the depth into an edge band (u = 1 at the edge). width_x / width_y are the
/// band widths in bohr; 0 disables the band on that axis.
struct Absorber {
  double width_x = 0.0;
  double width_y = 0.0;
  double strength = 0.0;

  bool enabled() const noexcept { return strength > 0.0 && (width_x > 0.0 || width_y > 0.0); }
  /// Mask factor at a grid node.
  double factor(const Grid2D& g, double x, double y) const noexcept;
};

struct PropagationParams {
  double dt = 0.0;
  std::size_t n_steps = 0;
  std::size_t save_every = 1;
  Absorber absorber;

  /// Throws ValidationError naming the offending field.
  void validate(const Grid2D& grid) const;
};

class SplitOperator {
 public:
  /// dt may be negative (backward propagation) only with the absorber off.
  SplitOperator(const Grid2D& grid, const PotentialSurface& v, double mass, double dt,
                const Absorber& absorber = {});

  const Grid2D& grid() const noexcept { return fft_.grid(); }
  double dt() const noexcept { return dt_; }
  double mass() const noexcept { return mass_; }
  const std::vector<double>& potential() const noexcept { return v_; }
  const spectral::Fft2D& fft() const noexcept { return fft_; }

  /// One step in place; advances psi.time(). Throws SimulationError when the
  /// norm becomes non-finite.
  void step(WaveField& psi);
  /// Norm removed by the absorber during the most recent step().
  double last_absorbed() const noexcept { return last_absorbed_; }

 private:
  spectral::Fft2D fft_;
  double dt_, mass_;
  std::vector<double> v_;
  std::vector<cplx> half_v_phase_;
  std::vector<cplx> kinetic_phase_;  // includes the 1/N of the inverse FFT
  std::vector<double> mask_;
  double last_absorbed_ = 0.0;
};

/// Pure single step: returns the propagated copy.
WaveField step(const WaveField& psi, const PotentialSurface& v, const PropagationParams& params);

struct Moments {
  double norm = 0;
  double mean_x = 0, mean_y = 0;
  double var_x = 0, var_y = 0;
  double mean_px = 0, mean_py = 0;
};

Moments moments(const WaveField& psi);
Moments moments(const WaveField& psi, const spectral::Fft2D& fft);

/// <psi|T|psi> / norm by spectral quadrature.
double kinetic_energy(const WaveField& psi, const spectral::Fft2D& fft);
/// <psi|V|psi> / norm on the grid.
double potential_energy(const WaveField& psi, std::span<const double> v);
/// <psi|H|psi> / norm.
double energy_expectation(const WaveField& psi, const PotentialSurface& v);
double energy_expectation(const WaveField& psi, const spectral::Fft2D& fft,
                          std::span<const double> v);

/// Largest density on the outermost grid rows/columns relative to the peak.
double boundary_density_ratio(const WaveField& psi);
inline constexpr double kBoundaryDensityLimit = 1e-10;

/// psi = (2 pi sx sy)^{-1/2} exp(-(x-x0)^2/4sx^2 - (y-y0)^2/4sy^2 + i(px x + py y)),
/// normalized on the grid. |psi|^2 has standard deviations (sx, sy).
/// Throws ValidationError when the packet is not inside the grid (relative
/// boundary density above kBoundaryDensityLimit).
WaveField make_gaussian(const Grid2D& grid, std::array<double, 2> center,
                        std::array<double, 2> widths, std::array<double, 2> momenta, double mass);

struct QuasiPlaneSpec {
  double x0 = -400.0;
  double y_center = 0.0;
  double energy = 500.0;
  std::size_t n_copies = 1;
  double spacing = 0.0;
  double sigma_x = 1.0;
  double sigma_y = 1.0;
};

/// Superposition of n_copies identical Gaussians at y_center + (k - (n-1)/2)
/// spacing, all with the same +x momentum chosen so that the grid-evaluated
/// <H> on surface v equals spec.energy.
WaveField make_quasi_plane(const Grid2D& grid, const QuasiPlaneSpec& spec, double mass,
                           const PotentialSurface& v);

/// One-dimensional split-operator propagator with a replaceable potential
/// (used by the mixed quantum-classical scheme).
class SplitOperator1D {
 public:
  SplitOperator1D(const Grid1D& grid, double mass, double dt);

  const Grid1D& grid() const noexcept { return grid_; }
  const spectral::Fft1D& fft() const noexcept { return fft_; }
  double dt() const noexcept { return dt_; }

  void set_potential(std::span<const double> v);
  void step(WaveField1D& psi) const;

 private:
  Grid1D grid_;
  spectral::Fft1D fft_;
  double dt_, mass_;
  std::vector<cplx> half_v_phase_;
  std::vector<cplx> kinetic_phase_;
};

double kinetic_energy(const WaveField1D& psi, const spectral::Fft1D& fft);
double potential_energy(const WaveField1D& psi, std::span<const double> v);

}  // namespace bohmflow

#pragma once

// Bohmian hydrodynamic fields derived from a wavefunction snapshot: density,
// probability current, guidance velocity, quantum potential and the quantum
// pressure tensor, plus solver diagnostics built on them.
//
// Nodes whose density falls below kDensityFloor * max(rho) are masked: the
// velocity, quantum potential and pressure are not evaluated there and the
// stored value is 0 with masked[idx] = 1.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bohmflow/spectral.hpp"
#include "bohmflow/wavefield.hpp"

namespace bohmflow {

inline constexpr double kDensityFloor = 1e-12;

struct VectorField {
  std::vector<double> x, y;
};

struct MaskedField {
  std::vector<double> values;
  std::vector<std::uint8_t> masked;
  std::size_t masked_count = 0;

  std::optional<double> at(std::size_t idx) const {
    if (masked[idx]) return std::nullopt;
    return values[idx];
  }
};

struct MaskedVectorField {
  std::vector<double> x, y;
  std::vector<std::uint8_t> masked;
  std::size_t masked_count = 0;
};

/// Symmetric 2x2 tensor per node; P_yx is P_xy by construction.
struct MaskedTensorField {
  std::vector<double> xx, xy, yy;
  std::vector<std::uint8_t> masked;
  std::size_t masked_count = 0;
};

struct HydroFields {
  Grid2D grid;
  double time = 0.0;
  double mass = 1.0;
  std::vector<double> rho;
  VectorField flux;
  MaskedVectorField velocity;
  MaskedField qpot;
  MaskedTensorField pressure;
};

/// Guidance velocity on the grid at one instant; what trajectory integrators
/// consume.
struct VelocitySnapshot {
  Grid2D grid;
  double time = 0.0;
  MaskedVectorField v;
};

/// Flags nodes below floor * max(rho).
std::vector<std::uint8_t> density_mask(std::span<const double> rho, std::size_t* masked_count,
                                       double floor = kDensityFloor);

/// Holds the FFT plans for one grid so that repeated field evaluations on the
/// same grid do not re-plan. All members are const and thread compatible.
class FieldCalculator {
 public:
  explicit FieldCalculator(const Grid2D& grid);

  const Grid2D& grid() const noexcept { return fft_.grid(); }
  const spectral::Fft2D& fft() const noexcept { return fft_; }

  std::vector<double> density(const WaveField& psi) const;
  VectorField quantum_flux(const WaveField& psi) const;
  MaskedField quantum_potential(const WaveField& psi) const;
  MaskedTensorField pressure_tensor(const WaveField& psi) const;
  VelocitySnapshot velocity(const WaveField& psi) const;
  HydroFields hydro(const WaveField& psi) const;

  /// Spectral divergence of a real periodic vector field.
  std::vector<double> divergence(const VectorField& f) const;

 private:
  void check(const WaveField& psi) const;
  spectral::Fft2D fft_;
};

std::vector<double> density(const WaveField& psi);
VectorField quantum_flux(const WaveField& psi);
/// v = J / rho where rho >= floor; masked elsewhere.
MaskedVectorField velocity_field(const Grid2D& grid, std::span<const double> rho,
                                 const VectorField& flux);
MaskedVectorField velocity_field(const HydroFields& fields);
MaskedField quantum_potential(const WaveField& psi);
MaskedTensorField pressure_tensor(const WaveField& psi);
HydroFields hydro_fields(const WaveField& psi);

/// max |(rho1 - rho0)/dt + div J_mid| with J_mid the average of the two
/// snapshots' currents. Throws ValidationError on grid mismatch or dt <= 0.
double continuity_residual(const WaveField& psi_t0, const WaveField& psi_t1);

/// max |Q(x,y) - Q1(x) - Q2(y)| over unmasked nodes, with the marginal parts
/// taken from the slices through the density maximum. Near zero for product
/// states; large for entangled ones.
double q_separability_residual(const WaveField& psi);

/// Residual of the quantum Euler equation written in conservation form,
///   m dJ/dt + div(P + m J J / rho) + rho grad V,
/// from three equally spaced snapshots (central difference in time at the
/// middle one). Returns the max-norm. grad_v is sampled on the grid.
double euler_residual(const WaveField& prev, const WaveField& mid, const WaveField& next,
                      const VectorField& grad_v);

}  // namespace bohmflow

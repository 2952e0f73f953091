#pragma once

// Reduced density matrices of a two-coordinate wavefunction and the reduced
// quantum trajectories they define.
//
//   rho(x, x') = int psi(x, y) psi*(x', y) dy
//   v(x)       = (hbar/m) Im[d_x rho(x, x')] / Re[rho(x, x')] at x' = x

#include <filesystem>
#include <vector>

#include "bohmflow/spectral.hpp"
#include "bohmflow/trajectories.hpp"
#include "bohmflow/wavefield.hpp"

namespace bohmflow {

enum class Axis { x, y };

/// Largest retained-axis size accepted by partial_trace (storage is n^2).
inline constexpr std::size_t kMaxReducedSize = 512;

struct ReducedDensity {
  Grid1D grid;
  double time = 0.0;
  double mass = 1.0;
  std::vector<cplx> rho;  // rho[i * n + k] = rho(x_i, x_k)

  std::size_t size() const noexcept { return grid.size(); }
  cplx operator()(std::size_t i, std::size_t k) const { return rho[i * grid.size() + k]; }
  std::vector<double> diagonal() const;
  double trace() const;
  /// Tr(rho^2)
  double purity() const;
  /// max |rho(x,x') - conj(rho(x',x))|
  double hermiticity_error() const;
};

/// Traces out `traced`; the other axis is retained. Throws ValidationError if
/// the retained axis has more than kMaxReducedSize points.
ReducedDensity partial_trace(const WaveField& psi, Axis traced = Axis::y);

struct ReducedVelocity {
  Grid1D grid;
  double time = 0.0;
  std::vector<double> diagonal;
  std::vector<double> v;
  std::vector<std::uint8_t> masked;
  std::size_t masked_count = 0;

  VelocitySnapshot1D snapshot() const { return {grid, time, v, masked}; }
};

/// Spectral derivative along the first index, then the diagonal.
ReducedVelocity reduced_velocity(const ReducedDensity& rho);

/// Reduced current (hbar/m) Im[d_x rho(x,x')]|_{x'=x} computed directly from
/// the parent wavefunction as sum_y Im(psi* d_x psi) dy.
std::vector<double> reduced_current_direct(const WaveField& psi);

/// Bohmian velocity of a one-dimensional wavefunction.
VelocitySnapshot1D velocity_1d(const WaveField1D& psi, const spectral::Fft1D& fft);

TrajectoryEnsemble1D integrate_reduced(const std::vector<double>& initial,
                                       const std::vector<ReducedVelocity>& snapshots,
                                       std::size_t substeps = 4);

/// max |(diag1 - diag0)/dt + d_x J_mid| with J_mid the average reduced
/// current of the two snapshots.
double reduced_continuity_residual(const ReducedDensity& r0, const ReducedDensity& r1);

/// Columns x, rho, v (v empty where masked).
void write_reduced_csv(const std::filesystem::path& path, const ReducedVelocity& rv);
/// Full rho(x, x') in the complex binary field format.
void write_reduced_binary(const std::filesystem::path& path, const ReducedDensity& rho);

}  // namespace bohmflow

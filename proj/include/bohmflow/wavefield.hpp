#pragma once

#include <complex>
#include <span>
#include <vector>

#include "bohmflow/grid.hpp"

namespace bohmflow {

using cplx = std::complex<double>;

/// Atomic units throughout; hbar is kept explicit in formulas for readability.
inline constexpr double kHbar = 1.0;

/// Complex wavefunction samples on a Grid2D at one instant.
class WaveField {
 public:
  WaveField() = default;
  WaveField(Grid2D grid, std::vector<cplx> values, double mass, double time = 0.0);

  const Grid2D& grid() const noexcept { return grid_; }
  std::span<const cplx> values() const noexcept { return values_; }
  std::span<cplx> values() noexcept { return values_; }
  cplx operator()(std::size_t i, std::size_t j) const { return values_[grid_.index(i, j)]; }

  double mass() const noexcept { return mass_; }
  double time() const noexcept { return time_; }
  void set_time(double t) noexcept { time_ = t; }

  /// Grid quadrature of |psi|^2.
  double norm() const;
  /// Rescales to unit norm; throws SimulationError for a zero or non-finite field.
  void normalize();

 private:
  Grid2D grid_;
  std::vector<cplx> values_;
  double mass_ = 1.0;
  double time_ = 0.0;
};

class WaveField1D {
 public:
  WaveField1D() = default;
  WaveField1D(Grid1D grid, std::vector<cplx> values, double mass, double time = 0.0);

  const Grid1D& grid() const noexcept { return grid_; }
  std::span<const cplx> values() const noexcept { return values_; }
  std::span<cplx> values() noexcept { return values_; }
  cplx operator[](std::size_t i) const { return values_[i]; }

  double mass() const noexcept { return mass_; }
  double time() const noexcept { return time_; }
  void set_time(double t) noexcept { time_ = t; }

  double norm() const;
  void normalize();

 private:
  Grid1D grid_;
  std::vector<cplx> values_;
  double mass_ = 1.0;
  double time_ = 0.0;
};

}  // namespace bohmflow

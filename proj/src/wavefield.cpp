#include "bohmflow/wavefield.hpp"

#include <cmath>

#include "bohmflow/kernels.hpp"

namespace bohmflow {

namespace {

void rescale(std::span<cplx> v, double norm) {
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw SimulationError("cannot normalize a wavefunction with norm " + std::to_string(norm));
  const double s = 1.0 / std::sqrt(norm);
  for (auto& z : v) z *= s;
}

}  // namespace

WaveField::WaveField(Grid2D grid, std::vector<cplx> values, double mass, double time)
    : grid_(grid), values_(std::move(values)), mass_(mass), time_(time) {
  if (values_.size() != grid_.size())
    throw ValidationError("wavefield.values", "sample count does not match the grid");
  if (!(mass > 0.0)) throw ValidationError("mass", "must be positive");
}

double WaveField::norm() const { return kernels::sum_abs_squared(values_) * grid_.cell_area(); }

void WaveField::normalize() { rescale(values_, norm()); }

WaveField1D::WaveField1D(Grid1D grid, std::vector<cplx> values, double mass, double time)
    : grid_(grid), values_(std::move(values)), mass_(mass), time_(time) {
  if (values_.size() != grid_.size())
    throw ValidationError("wavefield.values", "sample count does not match the grid");
  if (!(mass > 0.0)) throw ValidationError("mass", "must be positive");
}

double WaveField1D::norm() const { return kernels::sum_abs_squared(values_) * grid_.dx(); }

void WaveField1D::normalize() { rescale(values_, norm()); }

}  // namespace bohmflow

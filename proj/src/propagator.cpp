#include "bohmflow/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bohmflow/kernels.hpp"

namespace bohmflow {

namespace {

double band(double d, double width, double strength) {
  if (width <= 0.0 || d >= width) return 1.0;
  const double u = 1.0 - std::max(d, 0.0) / width;
  const double s = std::sin(0.5 * std::numbers::pi * u);
  return 1.0 - strength * s * s;
}

std::vector<cplx> phase(std::span<const double> v, double scale) {
  std::vector<cplx> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::polar(1.0, -v[i] * scale);
  return out;
}

}  // namespace

double Absorber::factor(const Grid2D& g, double x, double y) const noexcept {
  if (!enabled()) return 1.0;
  const double last_x = g.x_max() - g.dx(), last_y = g.y_max() - g.dy();
  return band(x - g.x_min(), width_x, strength) * band(last_x - x, width_x, strength) *
         band(y - g.y_min(), width_y, strength) * band(last_y - y, width_y, strength);
}

void PropagationParams::validate(const Grid2D& grid) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("propagation.dt", "must be positive");
  if (n_steps == 0) throw ValidationError("propagation.n_steps", "must be positive");
  if (save_every == 0) throw ValidationError("propagation.save_every", "must be positive");
  if (absorber.width_x < 0.0 || 2.0 * absorber.width_x >= grid.x_max() - grid.x_min())
    throw ValidationError("propagation.absorber.width_x", "must be in [0, half the x extent)");
  if (absorber.width_y < 0.0 || 2.0 * absorber.width_y >= grid.y_max() - grid.y_min())
    throw ValidationError("propagation.absorber.width_y", "must be in [0, half the y extent)");
  if (absorber.strength < 0.0 || absorber.strength > 1.0)
    throw ValidationError("propagation.absorber.strength", "must be in [0, 1]");
}

SplitOperator::SplitOperator(const Grid2D& grid, const PotentialSurface& v, double mass, double dt,
                             const Absorber& absorber)
    : fft_(grid), dt_(dt), mass_(mass), v_(v.sample(grid)) {
  if (!(mass > 0.0)) throw ValidationError("mass", "must be positive");
  if (dt == 0.0 || !std::isfinite(dt)) throw ValidationError("dt", "must be finite and non-zero");
  if (absorber.enabled() && dt < 0.0)
    throw ValidationError("dt", "backward steps are not defined with an absorber");
  half_v_phase_ = phase(v_, 0.5 * dt / kHbar);

  const auto& kx = fft_.kx();
  const auto& ky = fft_.ky();
  const double inv_n = 1.0 / static_cast<double>(grid.size());
  kinetic_phase_.resize(grid.size());
  for (std::size_t i = 0; i < grid.nx(); ++i)
    for (std::size_t j = 0; j < grid.ny(); ++j) {
      const double t = kHbar * (kx[i] * kx[i] + ky[j] * ky[j]) / (2.0 * mass);
      kinetic_phase_[grid.index(i, j)] = std::polar(inv_n, -t * dt);
    }

  if (absorber.enabled()) {
    mask_.resize(grid.size());
    for (std::size_t i = 0; i < grid.nx(); ++i)
      for (std::size_t j = 0; j < grid.ny(); ++j)
        mask_[grid.index(i, j)] = absorber.factor(grid, grid.x(i), grid.y(j));
  }
}

void SplitOperator::step(WaveField& psi) {
  if (!(psi.grid() == grid())) throw ValidationError("wavefield.grid", "does not match propagator");
  if (psi.mass() != mass_) throw ValidationError("wavefield.mass", "does not match propagator");
  auto v = psi.values();
  kernels::multiply(v, half_v_phase_);
  fft_.forward(v);
  kernels::multiply(v, kinetic_phase_);
  fft_.backward(v);
  kernels::multiply(v, half_v_phase_);
  last_absorbed_ = 0.0;
  double after = 0.0;
  if (!mask_.empty()) {
    const double before = kernels::sum_abs_squared(v);
    kernels::scale_real(v, mask_);
    after = kernels::sum_abs_squared(v);
    last_absorbed_ = (before - after) * grid().cell_area();
  } else {
    after = kernels::sum_abs_squared(v);
  }
  psi.set_time(psi.time() + dt_);
  if (!std::isfinite(after))
    throw SimulationError("non-finite wavefunction after step at t = " + std::to_string(psi.time()));
}

WaveField step(const WaveField& psi, const PotentialSurface& v, const PropagationParams& params) {
  params.validate(psi.grid());
  SplitOperator op(psi.grid(), v, psi.mass(), params.dt, params.absorber);
  WaveField out = psi;
  op.step(out);
  return out;
}

Moments moments(const WaveField& psi) { return moments(psi, spectral::Fft2D(psi.grid())); }

Moments moments(const WaveField& psi, const spectral::Fft2D& fft) {
  const Grid2D& g = psi.grid();
  const auto v = psi.values();
  spectral::Gradient2D grad;
  spectral::derivatives(fft, v, &grad, nullptr);
  double n = 0, sx = 0, sy = 0, sxx = 0, syy = 0, px = 0, py = 0;
  for (std::size_t i = 0; i < g.nx(); ++i) {
    const double x = g.x(i);
    for (std::size_t j = 0; j < g.ny(); ++j) {
      const std::size_t idx = g.index(i, j);
      const double y = g.y(j);
      const double r = std::norm(v[idx]);
      n += r;
      sx += r * x;
      sy += r * y;
      sxx += r * x * x;
      syy += r * y * y;
      px += (std::conj(v[idx]) * grad.dx[idx]).imag();
      py += (std::conj(v[idx]) * grad.dy[idx]).imag();
    }
  }
  Moments m;
  m.norm = n * g.cell_area();
  m.mean_x = sx / n;
  m.mean_y = sy / n;
  m.var_x = sxx / n - m.mean_x * m.mean_x;
  m.var_y = syy / n - m.mean_y * m.mean_y;
  m.mean_px = kHbar * px / n;
  m.mean_py = kHbar * py / n;
  return m;
}

double kinetic_energy(const WaveField& psi, const spectral::Fft2D& fft) {
  const Grid2D& g = psi.grid();
  std::vector<cplx> spec(psi.values().begin(), psi.values().end());
  fft.forward(spec);
  const auto& kx = fft.kx();
  const auto& ky = fft.ky();
  std::vector<double> t(g.size());
  for (std::size_t i = 0; i < g.nx(); ++i)
    for (std::size_t j = 0; j < g.ny(); ++j)
      t[g.index(i, j)] = kHbar * kHbar * (kx[i] * kx[i] + ky[j] * ky[j]) / (2.0 * psi.mass());
  return kernels::weighted_abs_squared(spec, t) / kernels::sum_abs_squared(spec);
}

double potential_energy(const WaveField& psi, std::span<const double> v) {
  if (v.size() != psi.values().size()) throw ValidationError("potential", "size does not match grid");
  return kernels::weighted_abs_squared(psi.values(), v) / kernels::sum_abs_squared(psi.values());
}

double energy_expectation(const WaveField& psi, const PotentialSurface& v) {
  const spectral::Fft2D fft(psi.grid());
  return energy_expectation(psi, fft, v.sample(psi.grid()));
}

double energy_expectation(const WaveField& psi, const spectral::Fft2D& fft,
                          std::span<const double> v) {
  return kinetic_energy(psi, fft) + potential_energy(psi, v);
}

double boundary_density_ratio(const WaveField& psi) {
  const Grid2D& g = psi.grid();
  const auto v = psi.values();
  double peak = 0.0, edge = 0.0;
  for (std::size_t i = 0; i < g.nx(); ++i)
    for (std::size_t j = 0; j < g.ny(); ++j) {
      const double r = std::norm(v[g.index(i, j)]);
      peak = std::max(peak, r);
      if (i == 0 || j == 0 || i + 1 == g.nx() || j + 1 == g.ny()) edge = std::max(edge, r);
    }
  return peak > 0.0 ? edge / peak : 0.0;
}

namespace {

// Momentum content out to 8 standard deviations must stay below the grid
// Nyquist wave number on each axis.
void check_resolved(const Grid2D& grid, std::array<double, 2> momenta, std::array<double, 2> widths) {
  const double dk[2] = {std::numbers::pi / grid.dx(), std::numbers::pi / grid.dy()};
  for (int a = 0; a < 2; ++a) {
    const double kmax = std::abs(momenta[a]) / kHbar + 8.0 / (2.0 * widths[a]);
    if (kmax >= dk[a])
      throw ValidationError("initial_state", "momentum content exceeds what the grid resolves (need finer spacing)");
  }
}

}  // namespace

WaveField make_gaussian(const Grid2D& grid, std::array<double, 2> center,
                        std::array<double, 2> widths, std::array<double, 2> momenta, double mass) {
  if (!(widths[0] > 0.0) || !(widths[1] > 0.0))
    throw ValidationError("initial_state.widths", "must be positive");
  if (!grid.contains(center[0], center[1]))
    throw ValidationError("initial_state.center", "outside the grid");
  check_resolved(grid, momenta, widths);
  const double amp = 1.0 / std::sqrt(2.0 * std::numbers::pi * widths[0] * widths[1]);
  std::vector<cplx> values(grid.size());
  for (std::size_t i = 0; i < grid.nx(); ++i) {
    const double u = grid.x(i) - center[0];
    for (std::size_t j = 0; j < grid.ny(); ++j) {
      const double w = grid.y(j) - center[1];
      const double re = -u * u / (4.0 * widths[0] * widths[0]) - w * w / (4.0 * widths[1] * widths[1]);
      const double ph = (momenta[0] * grid.x(i) + momenta[1] * grid.y(j)) / kHbar;
      values[grid.index(i, j)] = std::polar(amp * std::exp(re), ph);
    }
  }
  WaveField psi(grid, std::move(values), mass);
  if (boundary_density_ratio(psi) > kBoundaryDensityLimit)
    throw ValidationError("initial_state.widths", "packet too wide for grid (boundary density too high)");
  psi.normalize();
  return psi;
}

WaveField make_quasi_plane(const Grid2D& grid, const QuasiPlaneSpec& spec, double mass,
                           const PotentialSurface& v) {
  if (spec.n_copies == 0) throw ValidationError("initial_state.n_copies", "must be positive");
  if (spec.n_copies > 1 && !(spec.spacing > 0.0))
    throw ValidationError("initial_state.spacing", "must be positive");
  if (!(spec.sigma_x > 0.0) || !(spec.sigma_y > 0.0))
    throw ValidationError("initial_state.widths", "must be positive");
  const double half_span = 0.5 * static_cast<double>(spec.n_copies - 1) * spec.spacing;
  if (spec.y_center - half_span < grid.y_min() || spec.y_center + half_span >= grid.y_max())
    throw ValidationError("initial_state.spacing", "copy span exceeds the grid");
  if (!grid.contains(spec.x0, spec.y_center))
    throw ValidationError("initial_state.x0", "outside the grid");

  std::vector<double> profile_y(grid.ny(), 0.0);
  for (std::size_t k = 0; k < spec.n_copies; ++k) {
    const double yc = spec.y_center + (static_cast<double>(k) - 0.5 * static_cast<double>(spec.n_copies - 1)) * spec.spacing;
    for (std::size_t j = 0; j < grid.ny(); ++j) {
      const double w = grid.y(j) - yc;
      profile_y[j] += std::exp(-w * w / (4.0 * spec.sigma_y * spec.sigma_y));
    }
  }
  std::vector<cplx> values(grid.size());
  for (std::size_t i = 0; i < grid.nx(); ++i) {
    const double u = grid.x(i) - spec.x0;
    const double fx = std::exp(-u * u / (4.0 * spec.sigma_x * spec.sigma_x));
    for (std::size_t j = 0; j < grid.ny(); ++j) values[grid.index(i, j)] = fx * profile_y[j];
  }
  WaveField psi(grid, std::move(values), mass);
  if (boundary_density_ratio(psi) > kBoundaryDensityLimit)
    throw ValidationError("initial_state", "quasi-plane packet not inside the grid");
  psi.normalize();

  // For a real psi, e^{ipx} adds exactly p^2/2m to <T> and leaves <V> alone.
  const spectral::Fft2D fft(grid);
  const double e0 = energy_expectation(psi, fft, v.sample(grid));
  const double excess = spec.energy - e0;
  if (!(excess > 0.0))
    throw ValidationError("initial_state.energy", "below the energy of the packet at rest");
  const double px = std::sqrt(2.0 * mass * excess);
  check_resolved(grid, {px, 0.0}, {spec.sigma_x, spec.sigma_y});
  auto vals = psi.values();
  for (std::size_t i = 0; i < grid.nx(); ++i) {
    const cplx ph = std::polar(1.0, px * grid.x(i) / kHbar);
    for (std::size_t j = 0; j < grid.ny(); ++j) vals[grid.index(i, j)] *= ph;
  }
  return psi;
}

SplitOperator1D::SplitOperator1D(const Grid1D& grid, double mass, double dt)
    : grid_(grid), fft_(grid), dt_(dt), mass_(mass) {
  if (!(mass > 0.0)) throw ValidationError("mass", "must be positive");
  if (dt == 0.0 || !std::isfinite(dt)) throw ValidationError("dt", "must be finite and non-zero");
  const auto& k = fft_.k();
  const double inv_n = 1.0 / static_cast<double>(grid.size());
  kinetic_phase_.resize(grid.size());
  for (std::size_t i = 0; i < k.size(); ++i)
    kinetic_phase_[i] = std::polar(inv_n, -kHbar * k[i] * k[i] / (2.0 * mass) * dt);
  half_v_phase_.assign(grid.size(), cplx(1.0, 0.0));
}

void SplitOperator1D::set_potential(std::span<const double> v) {
  if (v.size() != grid_.size()) throw ValidationError("potential", "size does not match grid");
  half_v_phase_ = phase(v, 0.5 * dt_ / kHbar);
}

void SplitOperator1D::step(WaveField1D& psi) const {
  if (!(psi.grid() == grid_)) throw ValidationError("wavefield.grid", "does not match propagator");
  auto v = psi.values();
  kernels::multiply(v, half_v_phase_);
  fft_.forward(v);
  kernels::multiply(v, kinetic_phase_);
  fft_.backward(v);
  kernels::multiply(v, half_v_phase_);
  psi.set_time(psi.time() + dt_);
  if (!std::isfinite(kernels::sum_abs_squared(v)))
    throw SimulationError("non-finite wavefunction after step at t = " + std::to_string(psi.time()));
}

double kinetic_energy(const WaveField1D& psi, const spectral::Fft1D& fft) {
  std::vector<cplx> spec(psi.values().begin(), psi.values().end());
  fft.forward(spec);
  const auto& k = fft.k();
  std::vector<double> t(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) t[i] = kHbar * kHbar * k[i] * k[i] / (2.0 * psi.mass());
  return kernels::weighted_abs_squared(spec, t) / kernels::sum_abs_squared(spec);
}

double potential_energy(const WaveField1D& psi, std::span<const double> v) {
  if (v.size() != psi.values().size()) throw ValidationError("potential", "size does not match grid");
  return kernels::weighted_abs_squared(psi.values(), v) / kernels::sum_abs_squared(psi.values());
}

}  // namespace bohmflow

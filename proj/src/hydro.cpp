#include "bohmflow/hydro.hpp"

#include <algorithm>
#include <cmath>

#include "bohmflow/kernels.hpp"

namespace bohmflow {

std::vector<std::uint8_t> density_mask(std::span<const double> rho, std::size_t* masked_count,
                                       double floor) {
  const double peak = rho.empty() ? 0.0 : *std::max_element(rho.begin(), rho.end());
  const double threshold = floor * peak;
  std::vector<std::uint8_t> mask(rho.size());
  std::size_t count = 0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    mask[i] = !(rho[i] >= threshold) || rho[i] <= 0.0;
    count += mask[i];
  }
  if (masked_count) *masked_count = count;
  return mask;
}

FieldCalculator::FieldCalculator(const Grid2D& grid) : fft_(grid) {}

void FieldCalculator::check(const WaveField& psi) const {
  if (!(psi.grid() == fft_.grid()))
    throw ValidationError("wavefield.grid", "does not match the calculator grid");
}

std::vector<double> FieldCalculator::density(const WaveField& psi) const {
  check(psi);
  std::vector<double> rho(psi.values().size());
  kernels::abs_squared(psi.values(), rho);
  return rho;
}

VectorField FieldCalculator::quantum_flux(const WaveField& psi) const {
  check(psi);
  spectral::Gradient2D grad;
  spectral::derivatives(fft_, psi.values(), &grad, nullptr);
  const std::size_t n = psi.values().size();
  VectorField j{std::vector<double>(n), std::vector<double>(n)};
  const double s = kHbar / psi.mass();
  kernels::current(psi.values(), grad.dx, s, j.x);
  kernels::current(psi.values(), grad.dy, s, j.y);
  return j;
}

MaskedField FieldCalculator::quantum_potential(const WaveField& psi) const {
  return hydro(psi).qpot;
}

MaskedTensorField FieldCalculator::pressure_tensor(const WaveField& psi) const {
  return hydro(psi).pressure;
}

VelocitySnapshot FieldCalculator::velocity(const WaveField& psi) const {
  const auto rho = density(psi);
  const auto j = quantum_flux(psi);
  return VelocitySnapshot{psi.grid(), psi.time(), velocity_field(psi.grid(), rho, j)};
}

HydroFields FieldCalculator::hydro(const WaveField& psi) const {
  check(psi);
  const std::size_t n = psi.values().size();
  const auto v = psi.values();
  spectral::Gradient2D g;
  spectral::Hessian2D h;
  spectral::derivatives(fft_, v, &g, &h);

  HydroFields out;
  out.grid = psi.grid();
  out.time = psi.time();
  out.mass = psi.mass();
  out.rho.resize(n);
  kernels::abs_squared(v, out.rho);
  out.flux = VectorField{std::vector<double>(n), std::vector<double>(n)};
  const double hm = kHbar / psi.mass();
  kernels::current(v, g.dx, hm, out.flux.x);
  kernels::current(v, g.dy, hm, out.flux.y);
  out.velocity = velocity_field(out.grid, out.rho, out.flux);

  const auto& mask = out.velocity.masked;
  const std::size_t masked = out.velocity.masked_count;
  out.qpot = MaskedField{std::vector<double>(n, 0.0), mask, masked};
  out.pressure = MaskedTensorField{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                                   std::vector<double>(n, 0.0), mask, masked};

  // Q = -(hbar^2/2m) lap(R)/R with lap(R)/R = Re(lap(psi)/psi) + |Im(grad(psi)/psi)|^2,
  // the same quantity as the density form but free of the 1/rho^2 loss of
  // precision near the floor.
  const double q_pref = -kHbar * kHbar / (2.0 * psi.mass());
  // P_ik = -(hbar^2/4m) (d_i d_k rho - d_i rho d_k rho / rho)
  const double p_pref = -kHbar * kHbar / (4.0 * psi.mass());
  for (std::size_t i = 0; i < n; ++i) {
    if (mask[i]) continue;
    const cplx z = v[i];
    const cplx lap = h.dxx[i] + h.dyy[i];
    const cplx gx = g.dx[i] / z, gy = g.dy[i] / z;
    out.qpot.values[i] = q_pref * ((lap / z).real() + gx.imag() * gx.imag() + gy.imag() * gy.imag());

    const double r = out.rho[i];
    const double rx = 2.0 * (std::conj(z) * g.dx[i]).real();
    const double ry = 2.0 * (std::conj(z) * g.dy[i]).real();
    const double rxx = 2.0 * (std::conj(z) * h.dxx[i] + std::conj(g.dx[i]) * g.dx[i]).real();
    const double ryy = 2.0 * (std::conj(z) * h.dyy[i] + std::conj(g.dy[i]) * g.dy[i]).real();
    const double rxy = 2.0 * (std::conj(z) * h.dxy[i] + std::conj(g.dx[i]) * g.dy[i]).real();
    out.pressure.xx[i] = p_pref * (rxx - rx * rx / r);
    out.pressure.yy[i] = p_pref * (ryy - ry * ry / r);
    out.pressure.xy[i] = p_pref * (rxy - rx * ry / r);
  }
  return out;
}

std::vector<double> FieldCalculator::divergence(const VectorField& f) const {
  const std::size_t n = grid().size();
  std::vector<cplx> fx(f.x.begin(), f.x.end()), fy(f.y.begin(), f.y.end());
  spectral::Gradient2D gx, gy;
  spectral::derivatives(fft_, fx, &gx, nullptr);
  spectral::derivatives(fft_, fy, &gy, nullptr);
  std::vector<double> div(n);
  for (std::size_t i = 0; i < n; ++i) div[i] = gx.dx[i].real() + gy.dy[i].real();
  return div;
}

std::vector<double> density(const WaveField& psi) { return FieldCalculator(psi.grid()).density(psi); }

VectorField quantum_flux(const WaveField& psi) {
  return FieldCalculator(psi.grid()).quantum_flux(psi);
}

MaskedVectorField velocity_field(const Grid2D& grid, std::span<const double> rho,
                                 const VectorField& flux) {
  const std::size_t n = grid.size();
  if (rho.size() != n || flux.x.size() != n || flux.y.size() != n)
    throw ValidationError("fields", "density and flux are not on the same grid");
  MaskedVectorField v;
  v.masked = density_mask(rho, &v.masked_count);
  v.x.assign(n, 0.0);
  v.y.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (v.masked[i]) continue;
    v.x[i] = flux.x[i] / rho[i];
    v.y[i] = flux.y[i] / rho[i];
  }
  return v;
}

MaskedVectorField velocity_field(const HydroFields& fields) {
  return velocity_field(fields.grid, fields.rho, fields.flux);
}

MaskedField quantum_potential(const WaveField& psi) {
  return FieldCalculator(psi.grid()).quantum_potential(psi);
}

MaskedTensorField pressure_tensor(const WaveField& psi) {
  return FieldCalculator(psi.grid()).pressure_tensor(psi);
}

HydroFields hydro_fields(const WaveField& psi) { return FieldCalculator(psi.grid()).hydro(psi); }

double continuity_residual(const WaveField& psi_t0, const WaveField& psi_t1) {
  if (!(psi_t0.grid() == psi_t1.grid()))
    throw ValidationError("snapshots", "grid mismatch between snapshots");
  const double dt = psi_t1.time() - psi_t0.time();
  if (!(dt > 0.0)) throw ValidationError("snapshots", "second snapshot must be later than the first");
  FieldCalculator calc(psi_t0.grid());
  const auto r0 = calc.density(psi_t0), r1 = calc.density(psi_t1);
  auto j0 = calc.quantum_flux(psi_t0);
  const auto j1 = calc.quantum_flux(psi_t1);
  for (std::size_t i = 0; i < j0.x.size(); ++i) {
    j0.x[i] = 0.5 * (j0.x[i] + j1.x[i]);
    j0.y[i] = 0.5 * (j0.y[i] + j1.y[i]);
  }
  const auto div = calc.divergence(j0);
  double worst = 0.0;
  for (std::size_t i = 0; i < div.size(); ++i)
    worst = std::max(worst, std::abs((r1[i] - r0[i]) / dt + div[i]));
  return worst;
}

double q_separability_residual(const WaveField& psi) {
  const Grid2D& g = psi.grid();
  FieldCalculator calc(g);
  const auto fields = calc.hydro(psi);
  const auto& q = fields.qpot;
  const auto peak = std::max_element(fields.rho.begin(), fields.rho.end()) - fields.rho.begin();
  const std::size_t is = static_cast<std::size_t>(peak) / g.ny();
  const std::size_t js = static_cast<std::size_t>(peak) % g.ny();
  const double q_ref = q.values[g.index(is, js)];
  double worst = 0.0;
  for (std::size_t i = 0; i < g.nx(); ++i) {
    const std::size_t row = g.index(i, js);
    if (q.masked[row]) continue;
    for (std::size_t j = 0; j < g.ny(); ++j) {
      const std::size_t idx = g.index(i, j), col = g.index(is, j);
      if (q.masked[idx] || q.masked[col]) continue;
      const double separable = q.values[row] + (q.values[col] - q_ref);
      worst = std::max(worst, std::abs(q.values[idx] - separable));
    }
  }
  return worst;
}

double euler_residual(const WaveField& prev, const WaveField& mid, const WaveField& next,
                      const VectorField& grad_v) {
  const Grid2D& g = mid.grid();
  if (!(prev.grid() == g) || !(next.grid() == g))
    throw ValidationError("snapshots", "grid mismatch between snapshots");
  const double dt_a = mid.time() - prev.time(), dt_b = next.time() - mid.time();
  if (!(dt_a > 0.0) || std::abs(dt_a - dt_b) > 1e-12 * std::max(dt_a, dt_b))
    throw ValidationError("snapshots", "snapshots must be equally spaced and increasing in time");
  const std::size_t n = g.size();
  if (grad_v.x.size() != n || grad_v.y.size() != n)
    throw ValidationError("grad_v", "not sampled on the snapshot grid");

  FieldCalculator calc(g);
  const auto jp = calc.quantum_flux(prev), jn = calc.quantum_flux(next);
  const auto f = calc.hydro(mid);
  const double m = mid.mass();

  // momentum-flux tensor P + m J J / rho, split into its two rows
  VectorField row_x{std::vector<double>(n), std::vector<double>(n)};
  VectorField row_y{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    double jj_xx = 0, jj_xy = 0, jj_yy = 0;
    if (!f.velocity.masked[i]) {
      jj_xx = m * f.flux.x[i] * f.velocity.x[i];
      jj_xy = m * f.flux.x[i] * f.velocity.y[i];
      jj_yy = m * f.flux.y[i] * f.velocity.y[i];
    }
    row_x.x[i] = f.pressure.xx[i] + jj_xx;
    row_x.y[i] = f.pressure.xy[i] + jj_xy;
    row_y.x[i] = f.pressure.xy[i] + jj_xy;
    row_y.y[i] = f.pressure.yy[i] + jj_yy;
  }
  const auto div_x = calc.divergence(row_x), div_y = calc.divergence(row_y);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double rx = m * (jn.x[i] - jp.x[i]) / (2.0 * dt_a) + div_x[i] + f.rho[i] * grad_v.x[i];
    const double ry = m * (jn.y[i] - jp.y[i]) / (2.0 * dt_a) + div_y[i] + f.rho[i] * grad_v.y[i];
    worst = std::max(worst, std::hypot(rx, ry));
  }
  return worst;
}

}  // namespace bohmflow

#include "bohmflow/reduced.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

#include "bohmflow/field_io.hpp"
#include "bohmflow/hydro.hpp"

namespace bohmflow {

std::vector<double> ReducedDensity::diagonal() const {
  const std::size_t n = size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = rho[i * n + i].real();
  return d;
}

double ReducedDensity::trace() const {
  double s = 0.0;
  for (double d : diagonal()) s += d;
  return s * grid.dx();
}

double ReducedDensity::purity() const {
  double s = 0.0;
  for (const auto& z : rho) s += std::norm(z);
  return s * grid.dx() * grid.dx();
}

double ReducedDensity::hermiticity_error() const {
  const std::size_t n = size();
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      e = std::max(e, std::abs(rho[i * n + k] - std::conj(rho[k * n + i])));
  return e;
}

ReducedDensity partial_trace(const WaveField& psi, Axis traced) {
  const Grid2D& g = psi.grid();
  const bool keep_x = traced == Axis::y;
  const std::size_t n = keep_x ? g.nx() : g.ny();
  const std::size_t m = keep_x ? g.ny() : g.nx();
  if (n > kMaxReducedSize)
    throw ValidationError("reduced.grid", "retained axis exceeds " + std::to_string(kMaxReducedSize) + " points");
  const double w = keep_x ? g.dy() : g.dx();
  const auto v = psi.values();
  auto at = [&](std::size_t r, std::size_t t) { return keep_x ? v[g.index(r, t)] : v[g.index(t, r)]; };

  ReducedDensity out;
  out.grid = keep_x ? x_axis(g) : y_axis(g);
  out.time = psi.time();
  out.mass = psi.mass();
  out.rho.assign(n * n, cplx{});
  // contiguous copy of the retained rows makes the inner product cache friendly
  std::vector<cplx> rows(n * m);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t t = 0; t < m; ++t) rows[r * m + t] = at(r, t);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = i; k < n; ++k) {
      cplx s{};
      const cplx* a = &rows[i * m];
      const cplx* b = &rows[k * m];
      for (std::size_t t = 0; t < m; ++t) s += a[t] * std::conj(b[t]);
      s *= w;
      out.rho[i * n + k] = s;
      out.rho[k * n + i] = std::conj(s);
    }
  for (std::size_t i = 0; i < n; ++i) out.rho[i * n + i] = out.rho[i * n + i].real();
  return out;
}

namespace {

std::vector<double> reduced_current(const ReducedDensity& r, const spectral::Fft1D& fft) {
  const std::size_t n = r.size();
  std::vector<double> j(n);
  std::vector<cplx> col(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) col[i] = r.rho[i * n + k];
    const auto d = spectral::derivative(fft, col, 1);
    j[k] = kHbar / r.mass * d[k].imag();
  }
  return j;
}

}  // namespace

ReducedVelocity reduced_velocity(const ReducedDensity& rho) {
  const spectral::Fft1D fft(rho.grid);
  const auto j = reduced_current(rho, fft);
  ReducedVelocity out;
  out.grid = rho.grid;
  out.time = rho.time;
  out.diagonal = rho.diagonal();
  out.masked = density_mask(out.diagonal, &out.masked_count);
  out.v.assign(out.diagonal.size(), 0.0);
  for (std::size_t i = 0; i < out.v.size(); ++i)
    if (!out.masked[i]) out.v[i] = j[i] / out.diagonal[i];
  return out;
}

std::vector<double> reduced_current_direct(const WaveField& psi) {
  const Grid2D& g = psi.grid();
  const spectral::Fft2D fft(g);
  spectral::Gradient2D grad;
  spectral::derivatives(fft, psi.values(), &grad, nullptr);
  const auto v = psi.values();
  std::vector<double> j(g.nx(), 0.0);
  for (std::size_t i = 0; i < g.nx(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < g.ny(); ++k) {
      const std::size_t idx = g.index(i, k);
      s += (std::conj(v[idx]) * grad.dx[idx]).imag();
    }
    j[i] = kHbar / psi.mass() * s * g.dy();
  }
  return j;
}

VelocitySnapshot1D velocity_1d(const WaveField1D& psi, const spectral::Fft1D& fft) {
  const auto d = spectral::derivative(fft, psi.values(), 1);
  const std::size_t n = psi.values().size();
  std::vector<double> rho(n);
  for (std::size_t i = 0; i < n; ++i) rho[i] = std::norm(psi[i]);
  VelocitySnapshot1D s;
  s.grid = psi.grid();
  s.time = psi.time();
  s.masked = density_mask(rho, nullptr);
  s.v.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (!s.masked[i]) s.v[i] = kHbar / psi.mass() * (std::conj(psi[i]) * d[i]).imag() / rho[i];
  return s;
}

TrajectoryEnsemble1D integrate_reduced(const std::vector<double>& initial,
                                       const std::vector<ReducedVelocity>& snapshots,
                                       std::size_t substeps) {
  std::vector<VelocitySnapshot1D> s;
  s.reserve(snapshots.size());
  for (const auto& r : snapshots) s.push_back(r.snapshot());
  return integrate_1d(initial, s, substeps);
}

double reduced_continuity_residual(const ReducedDensity& r0, const ReducedDensity& r1) {
  if (!(r0.grid == r1.grid)) throw ValidationError("snapshots", "grid mismatch between snapshots");
  const double dt = r1.time - r0.time;
  if (!(dt > 0.0)) throw ValidationError("snapshots", "second snapshot must be later than the first");
  const spectral::Fft1D fft(r0.grid);
  const auto j0 = reduced_current(r0, fft), j1 = reduced_current(r1, fft);
  std::vector<cplx> jm(j0.size());
  for (std::size_t i = 0; i < jm.size(); ++i) jm[i] = 0.5 * (j0[i] + j1[i]);
  const auto div = spectral::derivative(fft, jm, 1);
  const auto d0 = r0.diagonal(), d1 = r1.diagonal();
  double worst = 0.0;
  for (std::size_t i = 0; i < d0.size(); ++i)
    worst = std::max(worst, std::abs((d1[i] - d0[i]) / dt + div[i].real()));
  return worst;
}

void write_reduced_csv(const std::filesystem::path& path, const ReducedVelocity& rv) {
  auto out = io::open_output(path);
  out << std::setprecision(12) << "x,rho,v\n";
  for (std::size_t i = 0; i < rv.v.size(); ++i) {
    out << rv.grid.x(i) << ',' << rv.diagonal[i] << ',';
    if (!rv.masked[i]) out << rv.v[i];
    out << '\n';
  }
}

void write_reduced_binary(const std::filesystem::path& path, const ReducedDensity& rho) {
  const Grid1D& g = rho.grid;
  const Grid2D square(g.size(), g.size(), g.x_min(), g.x_max(), g.x_min(), g.x_max());
  io::write_field_binary(path, square, rho.time, std::span<const cplx>(rho.rho));
}

}  // namespace bohmflow

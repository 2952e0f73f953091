#include "bohmflow/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>

#include "bohmflow/field_io.hpp"
#include "bohmflow/kernels.hpp"
#include "bohmflow/propagator.hpp"

namespace bohmflow {

std::string_view sampling_kind_name(SamplingKind k) noexcept {
  switch (k) {
    case SamplingKind::bohmian_rho0: return "bohmian_rho0";
    case SamplingKind::classical_rho0: return "classical_rho0";
    case SamplingKind::classical_wigner: return "classical_wigner";
  }
  return "bohmian_rho0";
}

SamplingKind parse_sampling_kind(std::string_view name) {
  for (auto k : {SamplingKind::bohmian_rho0, SamplingKind::classical_rho0,
                 SamplingKind::classical_wigner})
    if (sampling_kind_name(k) == name) return k;
  throw ValidationError("sampling.kind", "unknown kind '" + std::string(name) + "'");
}

namespace {

void check_n(const SamplingSpec& spec) {
  if (spec.n == 0) throw ValidationError("sampling.n", "must be positive");
}

}  // namespace

InitialConditions sample(const SamplingSpec& spec, const GaussianPacket& packet) {
  check_n(spec);
  if (!(packet.widths[0] > 0.0) || !(packet.widths[1] > 0.0))
    throw ValidationError("initial_state.widths", "must be positive");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  InitialConditions ic;
  ic.position.resize(spec.n);
  ic.momentum.resize(spec.n);
  const bool wigner = spec.kind == SamplingKind::classical_wigner;
  const Vec2 sp{kHbar / (2.0 * packet.widths[0]), kHbar / (2.0 * packet.widths[1])};
  for (std::size_t k = 0; k < spec.n; ++k) {
    ic.position[k] = {packet.center[0] + packet.widths[0] * normal(rng),
                      packet.center[1] + packet.widths[1] * normal(rng)};
    if (wigner)
      ic.momentum[k] = {packet.momenta[0] + sp[0] * normal(rng),
                        packet.momenta[1] + sp[1] * normal(rng)};
    else
      ic.momentum[k] = packet.momenta;
  }
  return ic;
}

InitialConditions sample(const SamplingSpec& spec, const WaveField& psi0) {
  check_n(spec);
  if (spec.kind == SamplingKind::classical_wigner)
    throw ValidationError("sampling.kind", "Wigner sampling needs a Gaussian initial state");
  const Grid2D& g = psi0.grid();
  std::vector<double> rho(g.size());
  kernels::abs_squared(psi0.values(), rho);
  const double peak = *std::max_element(rho.begin(), rho.end());
  if (!(peak > 0.0)) throw ValidationError("initial_state", "zero density");
  const auto m = moments(psi0);
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> ux(0.0, static_cast<double>(g.nx() - 1));
  std::uniform_real_distribution<double> uy(0.0, static_cast<double>(g.ny() - 1));
  std::uniform_real_distribution<double> accept(0.0, peak);
  InitialConditions ic;
  ic.position.reserve(spec.n);
  ic.momentum.assign(spec.n, Vec2{m.mean_px, m.mean_py});
  while (ic.position.size() < spec.n) {
    const double fx = ux(rng), fy = uy(rng);
    const auto i = std::min(static_cast<std::size_t>(fx), g.nx() - 2);
    const auto j = std::min(static_cast<std::size_t>(fy), g.ny() - 2);
    const double tx = fx - static_cast<double>(i), ty = fy - static_cast<double>(j);
    const double r = (1 - tx) * (1 - ty) * rho[g.index(i, j)] + tx * (1 - ty) * rho[g.index(i + 1, j)] +
                     (1 - tx) * ty * rho[g.index(i, j + 1)] + tx * ty * rho[g.index(i + 1, j + 1)];
    if (accept(rng) < r) ic.position.push_back({g.x_min() + fx * g.dx(), g.y_min() + fy * g.dy()});
  }
  return ic;
}

std::size_t TrajectoryEnsemble::masked_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(masked_at.begin(), masked_at.end(),
                                                [](std::int64_t f) { return f >= 0; }));
}

std::size_t TrajectoryEnsemble1D::masked_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(masked_at.begin(), masked_at.end(),
                                                [](std::int64_t f) { return f >= 0; }));
}

bool interpolate_velocity(const Grid2D& g, const MaskedVectorField& v, double x, double y,
                          Vec2& out) {
  const double fx = (x - g.x_min()) / g.dx(), fy = (y - g.y_min()) / g.dy();
  if (!(fx >= 0.0) || !(fy >= 0.0)) return false;
  const auto i = static_cast<std::size_t>(fx), j = static_cast<std::size_t>(fy);
  if (i + 1 >= g.nx() || j + 1 >= g.ny()) return false;
  const std::size_t a = g.index(i, j), b = g.index(i + 1, j), c = g.index(i, j + 1),
                    d = g.index(i + 1, j + 1);
  if (v.masked[a] || v.masked[b] || v.masked[c] || v.masked[d]) return false;
  const double tx = fx - static_cast<double>(i), ty = fy - static_cast<double>(j);
  const double wa = (1 - tx) * (1 - ty), wb = tx * (1 - ty), wc = (1 - tx) * ty, wd = tx * ty;
  out = {wa * v.x[a] + wb * v.x[b] + wc * v.x[c] + wd * v.x[d],
         wa * v.y[a] + wb * v.y[b] + wc * v.y[c] + wd * v.y[d]};
  return true;
}

BohmianIntegrator::BohmianIntegrator(std::vector<Vec2> initial, std::size_t substeps)
    : pos_(std::move(initial)), dead_(pos_.size(), 0), substeps_(substeps) {
  if (substeps_ == 0) throw ValidationError("substeps", "must be positive");
  ens_.kind = EnsembleKind::bohmian;
  ens_.n = pos_.size();
  ens_.masked_at.assign(pos_.size(), -1);
}

bool BohmianIntegrator::velocity(const VelocitySnapshot& a, const VelocitySnapshot& b, double t,
                                 const Vec2& p, Vec2& v) const {
  Vec2 va, vb;
  if (!interpolate_velocity(a.grid, a.v, p[0], p[1], va)) return false;
  if (!interpolate_velocity(b.grid, b.v, p[0], p[1], vb)) return false;
  const double w = (t - a.time) / (b.time - a.time);
  v = {(1 - w) * va[0] + w * vb[0], (1 - w) * va[1] + w * vb[1]};
  return true;
}

void BohmianIntegrator::advance(const VelocitySnapshot& a, const VelocitySnapshot& b) {
  if (!(b.time > a.time)) throw ValidationError("snapshots", "must be increasing in time");
  if (!(a.grid == b.grid)) throw ValidationError("snapshots", "grid mismatch");
  const double h = (b.time - a.time) / static_cast<double>(substeps_);
  const auto frame = static_cast<std::int64_t>(ens_.times.size());
  for (std::size_t k = 0; k < pos_.size(); ++k) {
    if (dead_[k]) continue;
    Vec2 p = pos_[k];
    bool ok = true;
    for (std::size_t s = 0; s < substeps_ && ok; ++s) {
      const double t = a.time + static_cast<double>(s) * h;
      Vec2 k1, k2, k3, k4;
      ok = velocity(a, b, t, p, k1) &&
           velocity(a, b, t + 0.5 * h, {p[0] + 0.5 * h * k1[0], p[1] + 0.5 * h * k1[1]}, k2) &&
           velocity(a, b, t + 0.5 * h, {p[0] + 0.5 * h * k2[0], p[1] + 0.5 * h * k2[1]}, k3) &&
           velocity(a, b, t + h, {p[0] + h * k3[0], p[1] + h * k3[1]}, k4);
      if (ok) {
        p[0] += h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
        p[1] += h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
      }
    }
    if (ok) {
      pos_[k] = p;
    } else {
      dead_[k] = 1;
      ens_.masked_at[k] = frame;
    }
  }
}

void BohmianIntegrator::record(double t) {
  ens_.times.push_back(t);
  ens_.positions.insert(ens_.positions.end(), pos_.begin(), pos_.end());
}

TrajectoryEnsemble BohmianIntegrator::finish() && { return std::move(ens_); }

TrajectoryEnsemble integrate_bohmian(const std::vector<Vec2>& initial,
                                     const std::vector<VelocitySnapshot>& snapshots,
                                     std::size_t substeps) {
  if (snapshots.empty()) throw ValidationError("snapshots", "need at least one snapshot");
  BohmianIntegrator it(initial, substeps);
  it.record(snapshots.front().time);
  for (std::size_t s = 1; s < snapshots.size(); ++s) {
    it.advance(snapshots[s - 1], snapshots[s]);
    it.record(snapshots[s].time);
  }
  return std::move(it).finish();
}

TrajectoryEnsemble integrate_classical(const InitialConditions& ic, const PotentialSurface& v,
                                       double mass, double dt, std::size_t n_steps,
                                       std::size_t record_every) {
  if (!(mass > 0.0)) throw ValidationError("mass", "must be positive");
  if (!(dt > 0.0)) throw ValidationError("dt", "must be positive");
  if (record_every == 0) throw ValidationError("record_every", "must be positive");
  if (ic.position.size() != ic.momentum.size())
    throw ValidationError("initial_conditions", "position and momentum counts differ");
  const std::size_t n = ic.position.size();
  TrajectoryEnsemble e;
  e.kind = EnsembleKind::classical;
  e.n = n;
  e.masked_at.assign(n, -1);
  const std::size_t frames = n_steps / record_every + 1;
  e.times.reserve(frames);
  for (std::size_t f = 0; f < frames; ++f) e.times.push_back(static_cast<double>(f * record_every) * dt);
  e.positions.resize(frames * n);
  e.momenta.resize(frames * n);
  std::vector<double> err(n, 0.0);

  for (std::size_t k = 0; k < n; ++k) {
    Vec2 x = ic.position[k], p = ic.momentum[k];
    auto energy = [&] { return (p[0] * p[0] + p[1] * p[1]) / (2.0 * mass) + v.value(x[0], x[1]); };
    const double e0 = energy();
    const double scale = std::max((p[0] * p[0] + p[1] * p[1]) / (2.0 * mass) + std::abs(v.value(x[0], x[1])), 1e-300);
    Vec2 f = v.gradient(x[0], x[1]);
    e.positions[k] = x;
    e.momenta[k] = p;
    for (std::size_t s = 1; s <= n_steps; ++s) {
      p[0] -= 0.5 * dt * f[0];
      p[1] -= 0.5 * dt * f[1];
      x[0] += dt * p[0] / mass;
      x[1] += dt * p[1] / mass;
      f = v.gradient(x[0], x[1]);
      p[0] -= 0.5 * dt * f[0];
      p[1] -= 0.5 * dt * f[1];
      if (s % record_every == 0) {
        const std::size_t fr = s / record_every;
        e.positions[fr * n + k] = x;
        e.momenta[fr * n + k] = p;
        err[k] = std::max(err[k], std::abs(energy() - e0) / scale);
      }
    }
    if (!std::isfinite(x[0]) || !std::isfinite(x[1]))
      throw SimulationError("classical trajectory diverged");
  }
  e.max_energy_error = n ? *std::max_element(err.begin(), err.end()) : 0.0;
  return e;
}

namespace {

bool interpolate_1d(const VelocitySnapshot1D& s, double x, double& out) {
  const double f = (x - s.grid.x_min()) / s.grid.dx();
  if (!(f >= 0.0)) return false;
  const auto i = static_cast<std::size_t>(f);
  if (i + 1 >= s.grid.size()) return false;
  if (s.masked[i] || s.masked[i + 1]) return false;
  const double t = f - static_cast<double>(i);
  out = (1 - t) * s.v[i] + t * s.v[i + 1];
  return true;
}

}  // namespace

TrajectoryEnsemble1D integrate_1d(const std::vector<double>& initial,
                                  const std::vector<VelocitySnapshot1D>& snapshots,
                                  std::size_t substeps) {
  if (snapshots.empty()) throw ValidationError("snapshots", "need at least one snapshot");
  if (substeps == 0) throw ValidationError("substeps", "must be positive");
  TrajectoryEnsemble1D e;
  e.n = initial.size();
  e.masked_at.assign(e.n, -1);
  std::vector<double> pos = initial;
  e.times.push_back(snapshots.front().time);
  e.positions.insert(e.positions.end(), pos.begin(), pos.end());
  for (std::size_t s = 1; s < snapshots.size(); ++s) {
    const auto& a = snapshots[s - 1];
    const auto& b = snapshots[s];
    if (!(b.time > a.time)) throw ValidationError("snapshots", "must be increasing in time");
    const double h = (b.time - a.time) / static_cast<double>(substeps);
    auto vel = [&](double t, double x, double& v) {
      double va, vb;
      if (!interpolate_1d(a, x, va) || !interpolate_1d(b, x, vb)) return false;
      const double w = (t - a.time) / (b.time - a.time);
      v = (1 - w) * va + w * vb;
      return true;
    };
    for (std::size_t k = 0; k < e.n; ++k) {
      if (e.masked_at[k] >= 0) continue;
      double x = pos[k];
      bool ok = true;
      for (std::size_t sub = 0; sub < substeps && ok; ++sub) {
        const double t = a.time + static_cast<double>(sub) * h;
        double k1, k2, k3, k4;
        ok = vel(t, x, k1) && vel(t + 0.5 * h, x + 0.5 * h * k1, k2) &&
             vel(t + 0.5 * h, x + 0.5 * h * k2, k3) && vel(t + h, x + h * k3, k4);
        if (ok) x += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
      }
      if (ok)
        pos[k] = x;
      else
        e.masked_at[k] = static_cast<std::int64_t>(s);
    }
    e.times.push_back(b.time);
    e.positions.insert(e.positions.end(), pos.begin(), pos.end());
  }
  return e;
}

void write_ensemble_csv(const std::filesystem::path& path, const TrajectoryEnsemble& e,
                        std::size_t traj_stride, std::size_t frame_stride) {
  traj_stride = std::max<std::size_t>(traj_stride, 1);
  frame_stride = std::max<std::size_t>(frame_stride, 1);
  const bool classical = e.kind == EnsembleKind::classical;
  auto out = io::open_output(path);
  out << std::setprecision(12) << (classical ? "id,t,x,y,px,py\n" : "id,t,x,y\n");
  for (std::size_t k = 0; k < e.n; k += traj_stride)
    for (std::size_t f = 0; f < e.frames(); f += frame_stride) {
      const auto& p = e.at(f, k);
      out << k << ',' << e.times[f] << ',' << p[0] << ',' << p[1];
      if (classical) out << ',' << e.momenta[f * e.n + k][0] << ',' << e.momenta[f * e.n + k][1];
      out << '\n';
    }
}

void write_arrow_map_csv(const std::filesystem::path& path, const VelocitySnapshot& snap,
                         std::size_t decimation) {
  decimation = std::max<std::size_t>(decimation, 1);
  const Grid2D& g = snap.grid;
  auto out = io::open_output(path);
  out << std::setprecision(12) << "x,y,vx,vy\n";
  for (std::size_t i = 0; i < g.nx(); i += decimation)
    for (std::size_t j = 0; j < g.ny(); j += decimation) {
      const std::size_t idx = g.index(i, j);
      if (snap.v.masked[idx]) continue;
      out << g.x(i) << ',' << g.y(j) << ',' << snap.v.x[idx] << ',' << snap.v.y[idx] << '\n';
    }
}

}  // namespace bohmflow

#include "bohmflow/mixed_qc.hpp"

#include <cmath>
#include <iomanip>

#include "bohmflow/field_io.hpp"
#include "bohmflow/kernels.hpp"
#include "bohmflow/reduced.hpp"
#include "bohmflow/trajectories.hpp"

namespace bohmflow {

std::string_view backreaction_mode_name(BackreactionMode m) noexcept {
  return m == BackreactionMode::expectation ? "expectation" : "trajectory";
}

BackreactionMode parse_backreaction_mode(std::string_view name) {
  for (auto m : {BackreactionMode::expectation, BackreactionMode::trajectory})
    if (backreaction_mode_name(m) == name) return m;
  throw ValidationError("mixed_qc.mode", "unknown mode '" + std::string(name) + "'");
}

double backreaction_force(const MixedState& s, const PotentialSurface& v, BackreactionMode mode) {
  if (mode == BackreactionMode::trajectory) return -v.gradient(s.x_traj, s.y)[1];
  const Grid1D& g = s.psi.grid();
  std::vector<double> dvdy(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) dvdy[i] = v.gradient(g.x(i), s.y)[1];
  return -kernels::weighted_abs_squared(s.psi.values(), dvdy) /
         kernels::sum_abs_squared(s.psi.values());
}

MixedIntegrator::MixedIntegrator(MixedState initial, PotentialSurface v, double dt,
                                 BackreactionMode mode)
    : s_(std::move(initial)),
      v_(std::move(v)),
      dt_(dt),
      mode_(mode),
      op_(s_.psi.grid(), s_.psi.mass(), dt) {
  if (!(dt > 0.0)) throw ValidationError("mixed_qc.dt", "must be positive");
  if (!(s_.m_y > 0.0)) throw ValidationError("mixed_qc.m_y", "must be positive");
  const double ratio = s_.m_y / s_.psi.mass();
  if (ratio < kMixedMinRatio)
    throw ValidationError("mixed_qc.m_y", "heavy/light mass ratio must be at least 10");
  if (ratio < kMixedWarnRatio)
    warning_ = "mass ratio " + std::to_string(ratio) + " is below 100; the heavy coordinate is not quasi-classical";
}

std::vector<double> MixedIntegrator::potential_at(double y) const {
  const Grid1D& g = s_.psi.grid();
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = v_.value(g.x(i), y);
  return out;
}

void MixedIntegrator::step() {
  const double p_half = s_.p_y + 0.5 * dt_ * backreaction_force(s_, v_, mode_);
  const double y_new = s_.y + dt_ * p_half / s_.m_y;
  op_.set_potential(potential_at(0.5 * (s_.y + y_new)));
  if (mode_ == BackreactionMode::trajectory) {
    const auto before = velocity_1d(s_.psi, op_.fft());
    op_.step(s_.psi);
    const auto after = velocity_1d(s_.psi, op_.fft());
    const auto tr = integrate_1d({s_.x_traj}, {before, after}, 1);
    if (tr.masked_count() > 0)
      throw SimulationError("light-coordinate trajectory left the grid or hit a node");
    s_.x_traj = tr.at(1, 0);
  } else {
    op_.step(s_.psi);
  }
  s_.y = y_new;
  s_.p_y = p_half + 0.5 * dt_ * backreaction_force(s_, v_, mode_);
  if (!std::isfinite(s_.y) || !std::isfinite(s_.p_y))
    throw SimulationError("heavy coordinate became non-finite at t = " + std::to_string(s_.time()));
}

double MixedIntegrator::total_energy() const {
  return kinetic_energy(s_.psi, op_.fft()) + potential_energy(s_.psi, potential_at(s_.y)) +
         s_.p_y * s_.p_y / (2.0 * s_.m_y);
}

MixedSample MixedIntegrator::sample() const {
  const Grid1D& g = s_.psi.grid();
  std::vector<double> x(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) x[i] = g.x(i);
  const double n2 = kernels::sum_abs_squared(s_.psi.values());
  return {s_.time(), s_.y, s_.p_y, kernels::weighted_abs_squared(s_.psi.values(), x) / n2,
          total_energy(), n2 * g.dx()};
}

MixedState mixed_step(const MixedState& s, const PotentialSurface& v, double dt,
                      BackreactionMode mode) {
  MixedIntegrator it(s, v, dt, mode);
  it.step();
  return it.state();
}

void write_mixed_csv(const std::filesystem::path& path, const std::vector<MixedSample>& series) {
  auto out = io::open_output(path);
  out << std::setprecision(15) << "t,y,p_y,mean_x,energy,norm\n";
  for (const auto& s : series)
    out << s.t << ',' << s.y << ',' << s.p_y << ',' << s.mean_x << ',' << s.energy << ',' << s.norm
        << '\n';
}

}  // namespace bohmflow

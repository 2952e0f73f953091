#pragma once

// Mixed quantum-classical dynamics: a light coordinate x carried by a 1D
// wavefunction, a heavy coordinate y moved by Newton's equation with the
// backreaction of the light wave.
//
//   i d psi/dt = [-(1/2m_x) d2/dx2 + V(x, y(t))] psi
//   m_y d2y/dt2 = -d/dy (V + Q)
//
// Q = -(1/2m_x) R''/R depends on y only through psi, so its explicit y
// derivative vanishes and the force reduces to the V term.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bohmflow/potentials.hpp"
#include "bohmflow/propagator.hpp"
#include "bohmflow/wavefield.hpp"

namespace bohmflow {

enum class BackreactionMode {
  expectation,  // force averaged over |psi|^2
  trajectory,   // force at one Bohmian x(t)
};

std::string_view backreaction_mode_name(BackreactionMode m) noexcept;
BackreactionMode parse_backreaction_mode(std::string_view name);

struct MixedState {
  WaveField1D psi;
  double y = 0.0;
  double p_y = 0.0;
  double m_y = 1.0;
  /// Bohmian light-coordinate position; used in trajectory mode.
  double x_traj = 0.0;
  double time() const noexcept { return psi.time(); }
};

/// Mass ratios below this are rejected, below kMixedWarnRatio accepted with a
/// warning.
inline constexpr double kMixedMinRatio = 10.0;
inline constexpr double kMixedWarnRatio = 100.0;

/// Force on y for the current state.
double backreaction_force(const MixedState& s, const PotentialSurface& v,
                          BackreactionMode mode = BackreactionMode::expectation);

struct MixedSample {
  double t, y, p_y, mean_x, energy, norm;
};

class MixedIntegrator {
 public:
  /// Throws ValidationError when m_y / m_x < kMixedMinRatio.
  MixedIntegrator(MixedState initial, PotentialSurface v, double dt,
                  BackreactionMode mode = BackreactionMode::expectation);

  /// One leapfrog step: half kick with the force of the current wave, drift
  /// of y, quantum step with V frozen at the midpoint y, half kick with the
  /// new wave.
  void step();
  void run(std::size_t n_steps) {
    for (std::size_t k = 0; k < n_steps; ++k) step();
  }

  const MixedState& state() const noexcept { return s_; }
  /// Non-empty when the mass ratio is in the warning band.
  const std::string& warning() const noexcept { return warning_; }
  /// <psi|h_x(y)|psi> + p_y^2 / 2 m_y
  double total_energy() const;
  MixedSample sample() const;

 private:
  std::vector<double> potential_at(double y) const;
  MixedState s_;
  PotentialSurface v_;
  double dt_;
  BackreactionMode mode_;
  SplitOperator1D op_;
  std::string warning_;
};

/// Functional form of one step.
MixedState mixed_step(const MixedState& s, const PotentialSurface& v, double dt,
                      BackreactionMode mode = BackreactionMode::expectation);

/// Columns t, y, p_y, mean_x, energy, norm.
void write_mixed_csv(const std::filesystem::path& path, const std::vector<MixedSample>& series);

}  // namespace bohmflow

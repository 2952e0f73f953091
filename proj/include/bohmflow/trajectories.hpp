#pragma once

// Initial-condition sampling and trajectory ensembles: Bohmian trajectories
// integrated through saved velocity snapshots, classical trajectories
// integrated on the potential surface.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bohmflow/hydro.hpp"
#include "bohmflow/potentials.hpp"
#include "bohmflow/wavefield.hpp"

namespace bohmflow {

enum class SamplingKind { bohmian_rho0, classical_rho0, classical_wigner };

std::string_view sampling_kind_name(SamplingKind k) noexcept;
SamplingKind parse_sampling_kind(std::string_view name);

struct SamplingSpec {
  SamplingKind kind = SamplingKind::bohmian_rho0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

/// Analytic description of a Gaussian initial packet (density standard
/// deviations `widths`, mean momenta `momenta`).
struct GaussianPacket {
  Vec2 center{};
  Vec2 widths{1.0, 1.0};
  Vec2 momenta{};
};

struct InitialConditions {
  std::vector<Vec2> position;
  std::vector<Vec2> momentum;
};

/// Exact draws for a Gaussian packet. rho0 kinds: positions ~ |psi0|^2,
/// momenta fixed at the packet momenta. Wigner: independent normals with
/// variance w^2 in position and hbar^2 / 4 w^2 in momentum per axis.
InitialConditions sample(const SamplingSpec& spec, const GaussianPacket& packet);

/// Rejection sampling against the bilinear interpolant of the grid density;
/// momenta fixed at the packet mean momentum. Wigner draws are not defined
/// for a general grid state and raise ValidationError.
InitialConditions sample(const SamplingSpec& spec, const WaveField& psi0);

enum class EnsembleKind { bohmian, classical };

/// Positions (and momenta for classical runs) at the recorded times, stored
/// frame-major: entry [f * n + k] is trajectory k at times[f].
struct TrajectoryEnsemble {
  EnsembleKind kind = EnsembleKind::bohmian;
  std::size_t n = 0;
  std::vector<double> times;
  std::vector<Vec2> positions;
  std::vector<Vec2> momenta;
  /// -1 for healthy trajectories; otherwise the frame index at which the
  /// trajectory left the grid or entered a masked node and was frozen.
  std::vector<std::int64_t> masked_at;
  /// Classical runs: largest energy deviation over all trajectories, relative
  /// to each trajectory's initial T + |V|.
  double max_energy_error = 0.0;

  std::size_t frames() const noexcept { return times.size(); }
  const Vec2& at(std::size_t frame, std::size_t k) const { return positions[frame * n + k]; }
  std::size_t masked_count() const noexcept;
  bool usable(std::size_t k) const noexcept { return masked_at[k] < 0; }
};

/// Streaming Bohmian integrator. Feed consecutive snapshot pairs with
/// advance(); each window is covered by `substeps` RK4 steps through the
/// velocity interpolated bilinearly in space and linearly in time.
class BohmianIntegrator {
 public:
  explicit BohmianIntegrator(std::vector<Vec2> initial, std::size_t substeps = 4);

  void advance(const VelocitySnapshot& a, const VelocitySnapshot& b);
  /// Append the current positions as a frame at time t.
  void record(double t);
  const std::vector<Vec2>& positions() const noexcept { return pos_; }
  TrajectoryEnsemble finish() &&;

 private:
  bool velocity(const VelocitySnapshot& a, const VelocitySnapshot& b, double t, const Vec2& p,
                Vec2& v) const;
  TrajectoryEnsemble ens_;
  std::vector<Vec2> pos_;
  std::vector<std::uint8_t> dead_;
  std::size_t substeps_;
};

/// Integrates through all snapshots and records a frame at each one.
TrajectoryEnsemble integrate_bohmian(const std::vector<Vec2>& initial,
                                     const std::vector<VelocitySnapshot>& snapshots,
                                     std::size_t substeps = 4);

/// Bilinear interpolation of a masked vector field; false when (x, y) is off
/// the grid or any of the four surrounding nodes is masked.
bool interpolate_velocity(const Grid2D& g, const MaskedVectorField& v, double x, double y,
                          Vec2& out);

/// Velocity Verlet with step dt for n_steps; frames recorded every
/// record_every steps (and at t = 0).
TrajectoryEnsemble integrate_classical(const InitialConditions& ic, const PotentialSurface& v,
                                       double mass, double dt, std::size_t n_steps,
                                       std::size_t record_every = 1);

/// One-dimensional counterparts used by the reduced dynamics.
struct VelocitySnapshot1D {
  Grid1D grid;
  double time = 0.0;
  std::vector<double> v;
  std::vector<std::uint8_t> masked;
};

struct TrajectoryEnsemble1D {
  std::size_t n = 0;
  std::vector<double> times;
  std::vector<double> positions;  // [f * n + k]
  std::vector<std::int64_t> masked_at;

  double at(std::size_t frame, std::size_t k) const { return positions[frame * n + k]; }
  std::size_t masked_count() const noexcept;
};

TrajectoryEnsemble1D integrate_1d(const std::vector<double>& initial,
                                  const std::vector<VelocitySnapshot1D>& snapshots,
                                  std::size_t substeps = 4);

/// Columns id, t, x, y (+ px, py for classical). Every `traj_stride`-th
/// trajectory and every `frame_stride`-th frame.
void write_ensemble_csv(const std::filesystem::path& path, const TrajectoryEnsemble& e,
                        std::size_t traj_stride = 1, std::size_t frame_stride = 1);

/// Columns x, y, vx, vy on every `decimation`-th node in each direction;
/// masked nodes are skipped.
void write_arrow_map_csv(const std::filesystem::path& path, const VelocitySnapshot& snap,
                         std::size_t decimation = 8);

}  // namespace bohmflow

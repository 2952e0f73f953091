#pragma once

// Analytic potential energy surfaces with gradients and Hessians, plus the
// reaction-path utilities used on the Mueller-Brown surface.

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bohmflow/grid.hpp"
#include "bohmflow/hydro.hpp"

namespace bohmflow {

enum class SurfaceKind { mueller_brown, double_slit, harmonic2d, free, separable_custom };

std::string_view surface_kind_name(SurfaceKind kind) noexcept;
/// Throws ValidationError("potential.kind") for unknown names.
SurfaceKind parse_surface_kind(std::string_view name);

/// Hessian entries (d2V/dx2, d2V/dxdy, d2V/dy2).
using Hessian = std::array<double, 3>;
using Vec2 = std::array<double, 2>;

class PotentialSurface {
 public:
  /// Four-Gaussian Mueller-Brown surface; every energy is multiplied by
  /// energy_scale.
  static PotentialSurface mueller_brown(double energy_scale = 1.0);
  /// (V0 - m w^2 y^2 / 2 + m^2 w^4 y^4 / 16 V0) exp(-x^2 / alpha^2). The y
  /// profile vanishes at the two slit centres y = +-2 sqrt(V0/m) / w.
  static PotentialSurface double_slit(double v0 = 8000.0, double omega = 600.0, double alpha = 25.0,
                                      double mass = 1.0);
  /// kx (x-x0)^2 / 2 + ky (y-y0)^2 / 2 + coupling (x-x0)(y-y0)
  static PotentialSurface harmonic2d(double kx, double ky, double x0 = 0.0, double y0 = 0.0,
                                     double coupling = 0.0);
  static PotentialSurface free();
  /// sum_n cx[n] x^n + sum_n cy[n] y^n
  static PotentialSurface separable(std::vector<double> cx, std::vector<double> cy);

  /// Build from a kind name and named parameters. Missing parameters take
  /// the defaults above; unknown names are rejected.
  static PotentialSurface from_parameters(std::string_view kind,
                                          const std::map<std::string, double>& params);

  SurfaceKind kind() const noexcept { return kind_; }
  /// Effective named parameters, defaults filled in.
  const std::map<std::string, double>& parameters() const noexcept { return params_; }

  double value(double x, double y) const;
  Vec2 gradient(double x, double y) const;
  Hessian hessian(double x, double y) const;

  std::vector<double> sample(const Grid2D& grid) const;
  VectorField sample_gradient(const Grid2D& grid) const;

 private:
  PotentialSurface(SurfaceKind kind, std::map<std::string, double> params);
  SurfaceKind kind_ = SurfaceKind::free;
  std::map<std::string, double> params_;
  std::vector<double> cx_, cy_;
};

struct StationaryPoint {
  double x = 0, y = 0, energy = 0;
  /// Hessian eigenvalues, ascending, and the eigenvector of the lower one.
  double lambda_min = 0, lambda_max = 0;
  Vec2 soft_mode{};
  /// Number of negative Hessian eigenvalues.
  int index = 0;
  double gradient_norm = 0;
};

/// Newton iteration on grad V = 0 from (x0, y0). Throws SimulationError when
/// it does not reach gradient norm `tol` within `max_iter` iterations.
StationaryPoint find_stationary_point(const PotentialSurface& v, double x0, double y0,
                                      double tol = 1e-10, int max_iter = 200);

/// Stationary points of the Mueller-Brown surface at unit energy scale:
/// three minima and the two saddles, located by Newton from fixed guesses.
struct MuellerBrownPoints {
  StationaryPoint m1, m2, m3, ts1, ts2;
};
MuellerBrownPoints mueller_brown_points(double energy_scale = 1.0);

struct ReactionPath {
  std::vector<Vec2> points;
  std::vector<double> arc_length;
  std::vector<double> energy;
  /// Index of the saddle inside `points`.
  std::size_t saddle_index = 0;
  std::string start_label, saddle_label, end_label;
};

struct DescentOptions {
  double step = 1e-4;
  double gradient_tol = 1e-6;
  std::size_t max_steps = 1'000'000;
};

/// Steepest-descent path from an index-1 saddle: normalized explicit Euler
/// steps of length `step` down both sides of the soft mode until the energy
/// stops decreasing, then a Newton polish of each end onto its minimum.
/// The returned path runs from the minimum on the -soft_mode side, through
/// the saddle, to the other minimum.
/// Throws ValidationError("start", "not a saddle") when Newton from `start`
/// lands on a stationary point of index != 1, and SimulationError when a
/// branch does not terminate within max_steps.
ReactionPath steepest_descent_path(const PotentialSurface& v, Vec2 start,
                                   const DescentOptions& opt = {});

/// Cumulative Euclidean polyline length; s[0] = 0. Needs at least two points.
std::vector<double> arc_length(const std::vector<Vec2>& points);

/// Columns x, y, s, V.
void write_reaction_path_csv(const std::filesystem::path& path, const ReactionPath& rp);

}  // namespace bohmflow

#pragma once

// Scenario files: JSON documents describing one experiment. See README.md
// for the full grammar. parse_scenario() rejects unknown keys and reports
// every problem as a ValidationError whose field() is the dotted key path.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bohmflow/mixed_qc.hpp"
#include "bohmflow/observables.hpp"
#include "bohmflow/propagator.hpp"
#include "bohmflow/reduced.hpp"
#include "bohmflow/trajectories.hpp"

namespace bohmflow {

using json = nlohmann::json;

enum class ScenarioKind { wavepacket, mixed_qc };

struct InitialStateSpec {
  enum class Kind { gaussian2d, quasi_plane } kind = Kind::gaussian2d;
  GaussianPacket packet;
  QuasiPlaneSpec quasi_plane;
};

struct SamplingEntry {
  std::string name;  // output label, defaults to the kind name
  SamplingSpec spec;
};

struct FractionsObservable {
  std::string name = "fractions";
  RegionSpec region;
};

struct ArrowMapObservable {
  std::vector<double> times;
  std::size_t decimation = 8;
};

struct ReducedObservable {
  Axis traced = Axis::y;
  std::vector<double> times;
};

struct OutputSpec {
  /// Bohmian positions, P(t) and energies are recorded every record_every
  /// saved snapshots.
  std::size_t record_every = 1;
  /// Times at which the wavefunction is dumped (binary) with a density CSV.
  std::vector<double> dump_times;
  std::size_t trajectory_stride = 1;
  std::size_t frame_stride = 1;
};

struct MixedSpec {
  Grid1D grid;
  double m_x = 1.0, m_y = 1.0;
  double x0 = 0.0, sigma = 1.0, px0 = 0.0;
  double y0 = 0.0, p_y0 = 0.0;
  double dt = 0.0;
  std::size_t n_steps = 0;
  std::size_t sample_every = 1;
  BackreactionMode mode = BackreactionMode::expectation;
  double x_traj0 = 0.0;
};

struct Scenario {
  std::string name;
  ScenarioKind kind = ScenarioKind::wavepacket;
  std::uint64_t seed = 0;
  std::string output_dir;
  PotentialSurface potential = PotentialSurface::free();

  // wavepacket scenarios
  Grid2D grid;
  double mass = 1.0;
  InitialStateSpec initial_state;
  PropagationParams propagation;
  /// Classical trajectories use dt / classical_substeps.
  std::size_t classical_substeps = 1;
  std::vector<SamplingEntry> sampling;
  std::vector<FractionsObservable> fractions;
  std::optional<AngularSpec> angular;
  std::optional<ArrowMapObservable> arrow_map;
  bool energy = false;
  std::optional<ReducedObservable> reduced;
  bool analytic_free = false;
  OutputSpec output;

  // mixed quantum-classical scenarios
  std::optional<MixedSpec> mixed;

  /// The document the scenario was parsed from.
  json source;
};

Scenario parse_scenario(const json& doc);
json load_json_file(const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);

/// Cross-field checks that need the built objects: initial packet inside the
/// grid, absorber clear of the slit region, region and time lists consistent
/// with the run. Throws ValidationError.
void validate_scenario(const Scenario& s);

/// Deterministic serialization (sorted keys, fixed number formatting).
std::string canonical_json(const json& doc);

/// Sets a scalar at a dotted path ("initial_state.p0"); the key must already
/// exist and hold a number unless `create` is set.
void set_dotted(json& doc, const std::string& path, double value, bool create = false);

}  // namespace bohmflow

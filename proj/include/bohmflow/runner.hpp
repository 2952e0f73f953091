#pragma once

// Orchestration: scenario -> propagation -> fields -> trajectories ->
// observables, with every output listed and hashed in manifest.json.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "bohmflow/scenario.hpp"

namespace bohmflow {

/// Value of BOHMFLOW_OUTPUT_ROOT, or the current directory.
std::filesystem::path default_output_root();

struct RunOptions {
  std::filesystem::path output_root = default_output_root();
  /// Progress messages; null for silence.
  std::ostream* log = nullptr;
};

struct RunResult {
  std::filesystem::path output_dir;
  bool complete = false;
  std::string error;
  /// Observable summaries, also stored under "results" in the manifest.
  json results;
  std::string manifest_hash;
};

/// Validates, then runs. Validation failures throw ValidationError before
/// anything is written; failures during the run are caught, recorded in the
/// manifest (status "incomplete") and reported through RunResult.
RunResult run_scenario(const Scenario& s, const RunOptions& opt = {});

struct SweepResult {
  std::vector<double> values;
  std::vector<RunResult> runs;
  std::filesystem::path summary_csv;
  bool all_complete = false;
};

/// Runs the scenario once per value of the dotted parameter, each in
/// <output_dir>/<param>=<value>/, then writes <output_dir>/summary.csv with
/// the final-time ever-crossed fractions of the Bohmian, classical rho0 and
/// classical Wigner ensembles. A failed point is recorded and the sweep
/// continues. Up to `jobs` points run concurrently.
SweepResult sweep(const json& doc, const std::string& param, const std::vector<double>& values,
                  const RunOptions& opt = {}, unsigned jobs = 1);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace bohmflow

#include "bohmflow/presets.hpp"

#include <cmath>
#include <sstream>

namespace bohmflow {

namespace {

std::string number_label(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

json mueller_brown(double p0) {
  return {
      {"name", "mueller-brown"},
      {"seed", 1729},
      {"output_dir", "mueller-brown-p0-" + number_label(p0)},
      // the scaled surface is soft towards the upper left, so the box reaches
      // (-3.5, 3.5) to keep the wave off the periodic boundary
      {"grid", {{"nx", 256}, {"ny", 256}, {"x_min", -3.5}, {"x_max", 1.5}, {"y_min", -1.5}, {"y_max", 3.5}}},
      {"mass", 1836.0},
      {"potential", {{"kind", "mueller_brown"}, {"energy_scale", 1e-3}}},
      // packet on the reactant minimum, sigma^2 = 0.0125
      {"initial_state",
       {{"kind", "gaussian2d"}, {"x0", 0.62350}, {"y0", 0.02804}, {"sigma", std::sqrt(0.0125)}, {"p0", p0}}},
      {"propagation", {{"dt", 0.5}, {"n_steps", 1400}, {"save_every", 2}}},
      {"classical_substeps", 5},
      {"sampling",
       json::array({{{"kind", "bohmian_rho0"}, {"n", 10000}},
                    {{"kind", "classical_rho0"}, {"n", 10000}},
                    {{"kind", "classical_wigner"}, {"n", 10000}}})},
      {"observables",
       json::array({{{"kind", "fractions"},
                     {"name", "products"},
                     {"region", {{"kind", "half_plane_above_line"}, {"a", 0.8024}, {"b", 1.2734}}}},
                    {{"kind", "energy"}},
                    {{"kind", "arrow_map"}, {"times", {0, 100, 200, 300, 500}}, {"decimation", 8}}})},
      {"output",
       {{"record_every", 5}, {"dump_times", {0, 100, 200, 300, 500, 700}}, {"trajectory_stride", 20}}},
  };
}

json double_slit() {
  return {
      {"name", "double-slit-500"},
      {"seed", 4242},
      {"grid", {{"nx", 1024}, {"ny", 512}, {"x_min", -13.0}, {"x_max", 17.72}, {"y_min", -5.12}, {"y_max", 5.12}}},
      {"mass", 1.0},
      // slit centres at y = +-2 sqrt(V0/m)/omega = +-0.660
      {"potential", {{"kind", "double_slit"}, {"v0", 1046.0}, {"omega", 98.0}, {"alpha", 0.5}, {"mass", 1.0}}},
      {"initial_state",
       {{"kind", "quasi_plane"},
        {"x0", -6.0},
        {"y_center", 0.0},
        {"energy", 500.0},
        {"n_copies", 7},
        {"spacing", 0.5},
        {"sigma_x", 1.0},
        {"sigma_y", 0.5}}},
      {"propagation",
       {{"dt", 2.5e-4},
        {"n_steps", 2000},
        {"save_every", 5},
        {"absorber", {{"width_x", 2.0}, {"width_y", 1.0}, {"strength", 0.2}}}}},
      {"sampling", json::array({{{"kind", "bohmian_rho0"}, {"n", 4000}}})},
      {"observables",
       json::array({{{"kind", "angular"}, {"origin", {0.0, 0.0}}, {"x_threshold", 3.0}, {"bin_width_deg", 1.0}},
                    {{"kind", "arrow_map"}, {"times", {0.0, 0.125, 0.25, 0.375, 0.5}}, {"decimation", 16}}})},
      {"output", {{"record_every", 10}, {"dump_times", {0.0, 0.25, 0.5}}, {"trajectory_stride", 4}}},
  };
}

json free_gaussian() {
  return {
      {"name", "free-gaussian-oracle"},
      {"seed", 99},
      {"grid", {{"nx", 256}, {"ny", 256}, {"x_min", -20.0}, {"x_max", 20.0}, {"y_min", -20.0}, {"y_max", 20.0}}},
      {"mass", 1.0},
      {"potential", {{"kind", "free"}}},
      {"initial_state", {{"kind", "gaussian2d"}, {"x0", 0.0}, {"y0", 0.0}, {"sigma", 1.0}, {"px0", 0.0}, {"py0", 0.0}}},
      {"propagation", {{"dt", 0.005}, {"n_steps", 1000}, {"save_every", 2}}},
      {"sampling", json::array({{{"kind", "bohmian_rho0"}, {"n", 1000}}})},
      {"observables",
       json::array({{{"kind", "analytic_free"}},
                    {{"kind", "energy"}},
                    {{"kind", "reduced"}, {"traced_axis", "y"}, {"times", {0.0, 5.0}}}})},
      {"output", {{"record_every", 10}}},
  };
}

json mixed_harmonic() {
  return {
      {"name", "mixed-qc-harmonic"},
      {"kind", "mixed_qc"},
      {"seed", 5},
      // light omega = 1, heavy omega = sqrt(ky/m_y) = 0.01
      {"potential", {{"kind", "harmonic2d"}, {"kx", 1.0}, {"ky", 1.0}, {"coupling", 0.05}}},
      {"mixed_qc",
       {{"grid", {{"n", 128}, {"x_min", -8.0}, {"x_max", 8.0}}},
        {"m_x", 1.0},
        {"m_y", 1e4},
        {"x0", 1.0},
        {"sigma", std::sqrt(0.5)},
        {"px0", 0.0},
        {"y0", 1.0},
        {"p_y0", 0.0},
        {"dt", 0.01},
        {"n_steps", 629},
        {"sample_every", 1},
        {"mode", "expectation"}}},
  };
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"mueller-brown", "double-slit-500", "free-gaussian-oracle", "mixed-qc-harmonic"};
}

json preset(std::string_view name) {
  if (name == "mueller-brown") return mueller_brown(10.0);
  constexpr std::string_view mb_prefix = "mueller-brown-p0-";
  if (name.substr(0, mb_prefix.size()) == mb_prefix) {
    const std::string v(name.substr(mb_prefix.size()));
    std::size_t pos = 0;
    double p0 = 0.0;
    try {
      p0 = std::stod(v, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != v.size() || v.empty() || !std::isfinite(p0))
      throw ValidationError("preset", "bad p0 in '" + std::string(name) + "'");
    return mueller_brown(p0);
  }
  if (name == "double-slit-500") return double_slit();
  if (name == "free-gaussian-oracle") return free_gaussian();
  if (name == "mixed-qc-harmonic") return mixed_harmonic();
  throw ValidationError("preset", "unknown preset '" + std::string(name) + "'");
}

}  // namespace bohmflow

#include "bohmflow/runner.hpp"

#include <fftw3.h>
#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "bohmflow/field_io.hpp"
#include "bohmflow/hydro.hpp"
#include "bohmflow/kernels.hpp"
#include "bohmflow/mixed_qc.hpp"
#include "bohmflow/observables.hpp"
#include "bohmflow/propagator.hpp"
#include "bohmflow/reduced.hpp"
#include "bohmflow/trajectories.hpp"

#ifndef BOHMFLOW_VERSION
#define BOHMFLOW_VERSION "unknown"
#endif

namespace bohmflow {

namespace fs = std::filesystem;

fs::path default_output_root() {
  const char* e = std::getenv("BOHMFLOW_OUTPUT_ROOT");
  return (e && *e) ? fs::path(e) : fs::path(".");
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

namespace {

std::mutex log_mutex;

void say(std::ostream* log, const std::string& msg) {
  if (!log) return;
  std::lock_guard lock(log_mutex);
  *log << msg << '\n' << std::flush;
}

std::string time_label(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool near_time(double a, double b, double dt) { return std::abs(a - b) <= 0.5 * dt; }

bool in_list(const std::vector<double>& times, double t, double dt) {
  return std::any_of(times.begin(), times.end(), [&](double s) { return near_time(s, t, dt); });
}

double json_number_or_nan(const json& j, std::initializer_list<const char*> path) {
  const json* cur = &j;
  for (const char* p : path) {
    if (!cur->is_object() || !cur->contains(p)) return std::nan("");
    cur = &(*cur)[p];
  }
  return cur->is_number() ? cur->get<double>() : std::nan("");
}

// Output bookkeeping and manifest writing shared by both pipelines.
class Manifest {
 public:
  Manifest(const Scenario& s, fs::path dir) : s_(s), dir_(std::move(dir)) {}

  fs::path file(const std::string& name) {
    files_.push_back(name);
    return dir_ / name;
  }

  json results = json::object();
  json ensembles = json::object();
  json warnings = json::array();

  std::string write(bool complete, const std::string& error, double wall) const {
    json m;
    m["status"] = complete ? "complete" : "incomplete";
    m["error"] = error;
    m["name"] = s_.name;
    m["scenario"] = s_.source;
    m["scenario_sha256"] = sha256_hex(canonical_json(s_.source));
    m["seed"] = s_.seed;
    m["version"] = BOHMFLOW_VERSION;
    m["fftw_version"] = std::string(fftw_version);
    m["isa"] = std::string(kernels::isa_name(kernels::active_isa()));
    json outs = json::array();
    std::vector<std::string> sorted = files_;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (const auto& f : sorted)
      if (fs::exists(dir_ / f)) outs.push_back({{"path", f}, {"sha256", sha256_file(dir_ / f)}});
    m["outputs"] = outs;
    m["ensembles"] = ensembles;
    m["results"] = results;
    m["warnings"] = warnings;
    const std::string hash = sha256_hex(canonical_json(m));
    m["manifest_hash"] = hash;
    m["wall_time_s"] = wall;
    auto out = io::open_output(dir_ / "manifest.json");
    out << m.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write manifest.json");
    return hash;
  }

 private:
  const Scenario& s_;
  fs::path dir_;
  std::vector<std::string> files_;
};

WaveField initial_wavefield(const Scenario& s) {
  if (s.initial_state.kind == InitialStateSpec::Kind::gaussian2d) {
    const auto& p = s.initial_state.packet;
    return make_gaussian(s.grid, p.center, p.widths, p.momenta, s.mass);
  }
  return make_quasi_plane(s.grid, s.initial_state.quasi_plane, s.mass, s.potential);
}

double sigma_free(double sigma0, double mass, double t) {
  const double r = kHbar * t / (2.0 * mass * sigma0 * sigma0);
  return sigma0 * std::sqrt(1.0 + r * r);
}

struct Recorded {
  std::vector<double> t, norm, energy, mean_x, mean_y, var_x, var_y;
  std::vector<std::vector<double>> P;  // per fractions observable
};

void run_wavepacket(const Scenario& s, Manifest& man, std::ostream* log) {
  const auto& prop = s.propagation;
  const double dt = prop.dt;
  const double save_dt = dt * static_cast<double>(prop.save_every);
  const std::size_t rec = s.output.record_every;

  WaveField psi = initial_wavefield(s);
  const WaveField psi0 = psi;
  FieldCalculator calc(s.grid);
  SplitOperator op(s.grid, s.potential, s.mass, dt, prop.absorber);

  io::write_field_csv(man.file("potential.csv"), s.grid, op.potential(), "V");

  // initial conditions
  std::vector<InitialConditions> ics;
  for (const auto& e : s.sampling) {
    if (s.initial_state.kind == InitialStateSpec::Kind::gaussian2d)
      ics.push_back(sample(e.spec, s.initial_state.packet));
    else
      ics.push_back(sample(e.spec, psi0));
  }

  if (s.energy) {
    json en;
    en["quantum"] = mean_energy(psi0, s.potential);
    if (s.initial_state.kind == InitialStateSpec::Kind::gaussian2d) {
      const auto terms = gaussian_energy_terms(psi0, s.initial_state.packet, s.potential);
      en["translational"] = terms.translational;
      en["v_bar"] = terms.v_bar;
      en["delta_bar"] = terms.delta_bar;
    }
    json per = json::object();
    for (std::size_t i = 0; i < s.sampling.size(); ++i) {
      const auto est = mean_energy(ics[i], s.potential, s.mass);
      per[s.sampling[i].name] = {{"kind", sampling_kind_name(s.sampling[i].spec.kind)},
                                 {"mean", est.mean},
                                 {"std_error", est.std_error},
                                 {"kinetic", est.kinetic},
                                 {"potential", est.potential}};
    }
    en["ensembles"] = per;
    man.results["energy"] = en;
  }

  // classical ensembles, frames aligned with the Bohmian record times
  std::map<std::size_t, TrajectoryEnsemble> ensembles;
  for (std::size_t i = 0; i < s.sampling.size(); ++i) {
    if (s.sampling[i].spec.kind == SamplingKind::bohmian_rho0) continue;
    say(log, "classical ensemble " + s.sampling[i].name);
    const std::size_t sub = s.classical_substeps;
    ensembles[i] = integrate_classical(ics[i], s.potential, s.mass, dt / static_cast<double>(sub),
                                       prop.n_steps * sub, prop.save_every * rec * sub);
  }

  std::vector<std::pair<std::size_t, BohmianIntegrator>> bohm;
  for (std::size_t i = 0; i < s.sampling.size(); ++i)
    if (s.sampling[i].spec.kind == SamplingKind::bohmian_rho0)
      bohm.emplace_back(i, BohmianIntegrator(ics[i].position));

  Recorded recd;
  recd.P.resize(s.fractions.size());
  auto record = [&](const WaveField& w) {
    const Moments m = moments(w, op.fft());
    recd.t.push_back(w.time());
    recd.norm.push_back(m.norm);
    recd.energy.push_back(energy_expectation(w, op.fft(), op.potential()));
    recd.mean_x.push_back(m.mean_x);
    recd.mean_y.push_back(m.mean_y);
    recd.var_x.push_back(m.var_x);
    recd.var_y.push_back(m.var_y);
    for (std::size_t r = 0; r < s.fractions.size(); ++r)
      recd.P[r].push_back(restricted_norm(w, s.fractions[r].region));
    for (auto& [i, it] : bohm) it.record(w.time());
  };

  std::vector<double> density_times = s.output.dump_times;
  if (s.arrow_map) density_times.insert(density_times.end(), s.arrow_map->times.begin(), s.arrow_map->times.end());
  std::vector<ReducedDensity> reduced_rhos;

  auto scheduled = [&](const WaveField& w, const VelocitySnapshot& snap) {
    const double t = w.time();
    const std::string lbl = time_label(t);
    if (in_list(s.output.dump_times, t, save_dt))
      io::write_wavefield_binary(man.file("psi_t" + lbl + ".bin"), w);
    if (in_list(density_times, t, save_dt)) {
      const auto rho = calc.density(w);
      io::write_field_csv(man.file("density_t" + lbl + ".csv"), s.grid, rho, "rho");
    }
    if (s.arrow_map && in_list(s.arrow_map->times, t, save_dt))
      write_arrow_map_csv(man.file("arrows_t" + lbl + ".csv"), snap, s.arrow_map->decimation);
    if (s.reduced && in_list(s.reduced->times, t, save_dt)) {
      auto r = partial_trace(w, s.reduced->traced);
      const auto rv = reduced_velocity(r);
      write_reduced_csv(man.file("reduced_t" + lbl + ".csv"), rv);
      write_reduced_binary(man.file("reduced_t" + lbl + ".bin"), r);
      reduced_rhos.push_back(std::move(r));
    }
  };

  VelocitySnapshot prev = calc.velocity(psi);
  record(psi);
  scheduled(psi, prev);
  double absorbed = 0.0;
  std::size_t saves = 0;
  const auto progress_every = std::max<std::size_t>(1, prop.n_steps / 10);
  for (std::size_t step_i = 1; step_i <= prop.n_steps; ++step_i) {
    op.step(psi);
    absorbed += op.last_absorbed();
    if (step_i % progress_every == 0)
      say(log, "step " + std::to_string(step_i) + "/" + std::to_string(prop.n_steps) + " t=" + time_label(psi.time()));
    if (step_i % prop.save_every != 0) continue;
    ++saves;
    VelocitySnapshot snap = calc.velocity(psi);
    for (auto& [i, it] : bohm) it.advance(prev, snap);
    if (saves % rec == 0) record(psi);
    scheduled(psi, snap);
    prev = std::move(snap);
  }
  io::write_wavefield_binary(man.file("psi_final.bin"), psi);

  for (auto& [i, it] : bohm) ensembles[i] = std::move(it).finish();

  // norm and energy series
  {
    auto out = io::open_output(man.file("norm_energy.csv"));
    out << "t,norm,energy,mean_x,mean_y,var_x,var_y\n";
    for (std::size_t f = 0; f < recd.t.size(); ++f)
      out << num(recd.t[f]) << ',' << num(recd.norm[f]) << ',' << num(recd.energy[f]) << ','
          << num(recd.mean_x[f]) << ',' << num(recd.mean_y[f]) << ',' << num(recd.var_x[f]) << ','
          << num(recd.var_y[f]) << '\n';
  }
  double norm_drift = 0.0, energy_drift = 0.0;
  for (std::size_t f = 0; f < recd.t.size(); ++f) {
    norm_drift = std::max(norm_drift, std::abs(recd.norm[f] - recd.norm[0]));
    energy_drift = std::max(energy_drift, std::abs(recd.energy[f] - recd.energy[0]) /
                                              std::max(std::abs(recd.energy[0]), 1e-300));
  }
  man.results["propagation"] = {{"norm_initial", recd.norm.front()},
                                {"norm_final", recd.norm.back()},
                                {"max_norm_drift", norm_drift},
                                {"energy_initial", recd.energy.front()},
                                {"energy_final", recd.energy.back()},
                                {"max_relative_energy_drift", energy_drift},
                                {"absorbed", absorbed},
                                {"t_final", psi.time()}};

  for (const auto& [i, e] : ensembles) {
    const auto& name = s.sampling[i].name;
    write_ensemble_csv(man.file("trajectories_" + name + ".csv"), e, s.output.trajectory_stride,
                       s.output.frame_stride);
    json info = {{"kind", sampling_kind_name(s.sampling[i].spec.kind)},
                 {"n", e.n},
                 {"masked", e.masked_count()},
                 {"frames", e.frames()}};
    if (e.kind == EnsembleKind::classical) info["max_energy_error"] = e.max_energy_error;
    man.ensembles[name] = info;
    if (e.masked_count() > 0)
      man.warnings.push_back(name + ": " + std::to_string(e.masked_count()) + " trajectories masked");
  }

  // fractions
  if (!s.fractions.empty()) {
    json fr = json::object();
    for (std::size_t r = 0; r < s.fractions.size(); ++r) {
      const auto& obs = s.fractions[r];
      json per = json::object();
      per["P_final"] = recd.P[r].back();
      for (const auto& [i, e] : ensembles) {
        const auto series = fraction_series(e, obs.region, recd.P[r]);
        write_fraction_csv(man.file("fractions_" + obs.name + "_" + s.sampling[i].name + ".csv"), series);
        json row = {{"kind", sampling_kind_name(s.sampling[i].spec.kind)},
                    {"W_final", series.W.back()},
                    {"W_bar_final", series.W_bar.back()},
                    {"n_used", series.n_used},
                    {"n_masked", series.n_masked}};
        if (e.kind == EnsembleKind::bohmian) {
          // largest deviation from the field value and the largest excess
          // over the three-sigma binomial band at the same instant
          const double n = static_cast<double>(std::max<std::size_t>(series.n_used, 1));
          double sup = 0.0, excess = -1.0, band_at_sup = 0.0;
          for (std::size_t f = 0; f < series.W.size(); ++f) {
            const double P = series.P[f];
            const double band = 3.0 * std::sqrt(std::max(P * (1.0 - P), 0.0) / n);
            const double d = std::abs(series.W[f] - P);
            if (d > sup) {
              sup = d;
              band_at_sup = band;
            }
            excess = std::max(excess, d - band);
          }
          row["sup_abs_W_minus_P"] = sup;
          row["band_at_sup"] = band_at_sup;
          row["max_excess_over_band"] = excess;
        }
        per[s.sampling[i].name] = row;
      }
      fr[obs.name] = per;
    }
    man.results["fractions"] = fr;
  }

  // angular distributions and non-crossing
  if (s.angular) {
    json an;
    const auto field = angular_distribution(psi, *s.angular);
    write_angular_csv(man.file("angular_field.csv"), field);
    an["field_total"] = field.total;
    const double p = std::sqrt(2.0 * s.mass *
                               (s.initial_state.kind == InitialStateSpec::Kind::quasi_plane
                                    ? s.initial_state.quasi_plane.energy
                                    : recd.energy.front()));
    const double lambda = 2.0 * std::numbers::pi * kHbar / p;
    an["wavelength"] = lambda;
    if (s.potential.kind() == SurfaceKind::double_slit) {
      const auto& pp = s.potential.parameters();
      const double d = 2.0 * 2.0 * std::sqrt(pp.at("v0") / pp.at("mass")) / pp.at("omega");
      an["slit_separation"] = d;
      an["fraunhofer_spacing"] = lambda / d;
      try {
        const auto fit = fit_fringes(field);
        an["fringe_spacing"] = fit.spacing;
        an["fringe_relative_error"] = std::abs(fit.spacing - lambda / d) / (lambda / d);
        an["fringe_maxima_sin_theta"] = fit.sin_theta;
      } catch (const SimulationError& e) {
        man.warnings.push_back(std::string("fringe fit: ") + e.what());
      }
    }
    json per = json::object();
    for (const auto& [i, e] : ensembles) {
      if (e.kind != EnsembleKind::bohmian) continue;
      const auto& name = s.sampling[i].name;
      const auto d = angular_distribution(e, *s.angular);
      write_angular_csv(man.file("angular_" + name + ".csv"), d);
      // trajectories that end on the other side of the symmetry axis; a
      // frozen trajectory has no real end point and is left out
      const double band = 2.0 * s.grid.dy();
      const double yc = s.angular->origin[1];
      std::size_t upper = 0, lower = 0, up_to_down = 0, down_to_up = 0;
      const std::size_t last = e.frames() - 1;
      for (std::size_t k = 0; k < e.n; ++k) {
        if (!e.usable(k)) continue;
        const double y0 = e.at(0, k)[1] - yc, y1 = e.at(last, k)[1] - yc;
        if (y0 > 0.0) {
          ++upper;
          if (y1 < -band) ++up_to_down;
        } else if (y0 < 0.0) {
          ++lower;
          if (y1 > band) ++down_to_up;
        }
      }
      per[name] = {{"counted", d.total},
                   {"usable", e.n - e.masked_count()},
                   {"started_upper", upper},
                   {"started_lower", lower},
                   {"crossed_upper_to_lower", up_to_down},
                   {"crossed_lower_to_upper", down_to_up},
                   {"tolerance_band", band}};
    }
    an["ensembles"] = per;
    man.results["angular"] = an;
  }

  // free-Gaussian comparison
  if (s.analytic_free) {
    const auto& pk = s.initial_state.packet;
    double width_err = 0.0;
    for (std::size_t f = 0; f < recd.t.size(); ++f) {
      const double t = recd.t[f];
      const double ex = sigma_free(pk.widths[0], s.mass, t), ey = sigma_free(pk.widths[1], s.mass, t);
      width_err = std::max({width_err, std::abs(std::sqrt(recd.var_x[f]) - ex) / ex,
                            std::abs(std::sqrt(recd.var_y[f]) - ey) / ey});
    }
    json af = {{"max_relative_width_error", width_err}};
    json per = json::object();
    for (const auto& [i, e] : ensembles) {
      if (e.kind != EnsembleKind::bohmian) continue;
      const auto& name = s.sampling[i].name;
      auto out = io::open_output(man.file("analytic_" + name + ".csv"));
      out << "id,t,x,y,x_exact,y_exact\n";
      double err = 0.0;
      for (std::size_t f = 0; f < e.frames(); ++f) {
        const double t = e.times[f];
        const double gx = sigma_free(pk.widths[0], s.mass, t) / pk.widths[0];
        const double gy = sigma_free(pk.widths[1], s.mass, t) / pk.widths[1];
        for (std::size_t k = 0; k < e.n; ++k) {
          if (!e.usable(k)) continue;
          const Vec2 q0 = e.at(0, k), q = e.at(f, k);
          const double xe = pk.center[0] + pk.momenta[0] * t / s.mass + (q0[0] - pk.center[0]) * gx;
          const double ye = pk.center[1] + pk.momenta[1] * t / s.mass + (q0[1] - pk.center[1]) * gy;
          err = std::max({err, std::abs(q[0] - xe), std::abs(q[1] - ye)});
          if (k % s.output.trajectory_stride == 0 && f % s.output.frame_stride == 0)
            out << k << ',' << num(t) << ',' << num(q[0]) << ',' << num(q[1]) << ',' << num(xe) << ','
                << num(ye) << '\n';
        }
      }
      per[name] = {{"max_abs_error", err}, {"masked", e.masked_count()}};
    }
    af["ensembles"] = per;
    man.results["analytic_free"] = af;
  }

  if (s.reduced && !reduced_rhos.empty()) {
    json rr = json::array();
    for (const auto& r : reduced_rhos)
      rr.push_back({{"t", r.time},
                    {"trace", r.trace()},
                    {"purity", r.purity()},
                    {"hermiticity_error", r.hermiticity_error()}});
    man.results["reduced"] = rr;
  }

  if (s.potential.kind() == SurfaceKind::mueller_brown) {
    const double scale = s.potential.parameters().at("energy_scale");
    const auto pts = mueller_brown_points(scale);
    {
      auto out = io::open_output(man.file("stationary_points.csv"));
      out << "label,x,y,V,index\n";
      const std::pair<const char*, const StationaryPoint*> rows[] = {
          {"M1", &pts.m1}, {"M2", &pts.m2}, {"M3", &pts.m3}, {"TS1", &pts.ts1}, {"TS2", &pts.ts2}};
      for (const auto& [label, p] : rows)
        out << label << ',' << num(p->x) << ',' << num(p->y) << ',' << num(p->energy) << ',' << p->index << '\n';
    }
    json paths = json::object();
    for (const auto& [label, p] : {std::pair{"ts1", &pts.ts1}, std::pair{"ts2", &pts.ts2}}) {
      const auto path = steepest_descent_path(s.potential, {p->x, p->y});
      write_reaction_path_csv(man.file(std::string("reaction_path_") + label + ".csv"), path);
      paths[label] = {{"from", path.start_label},
                      {"saddle", path.saddle_label},
                      {"to", path.end_label},
                      {"length", path.arc_length.back()},
                      {"barrier", path.energy[path.saddle_index] - path.energy.front()}};
    }
    man.results["reaction_paths"] = paths;
  }
}

void run_mixed(const Scenario& s, Manifest& man) {
  const auto& m = *s.mixed;
  std::vector<cplx> v(m.grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = m.grid.x(i) - m.x0;
    v[i] = std::exp(cplx(-x * x / (4.0 * m.sigma * m.sigma), m.px0 * m.grid.x(i) / kHbar));
  }
  MixedState st;
  st.psi = WaveField1D(m.grid, std::move(v), m.m_x);
  st.psi.normalize();
  st.y = m.y0;
  st.p_y = m.p_y0;
  st.m_y = m.m_y;
  st.x_traj = m.x_traj0;
  MixedIntegrator integ(std::move(st), s.potential, m.dt, m.mode);
  if (!integ.warning().empty()) man.warnings.push_back(integ.warning());

  std::vector<MixedSample> series{integ.sample()};
  for (std::size_t k = 1; k <= m.n_steps; ++k) {
    integ.step();
    if (k % m.sample_every == 0 || k == m.n_steps) series.push_back(integ.sample());
  }
  write_mixed_csv(man.file("mixed_qc.csv"), series);

  {
    const auto& psi = integ.state().psi;
    auto out = io::open_output(man.file("mixed_density_final.csv"));
    out << "x,rho\n";
    for (std::size_t i = 0; i < psi.grid().size(); ++i)
      out << num(psi.grid().x(i)) << ',' << num(std::norm(psi[i])) << '\n';
  }

  double e_drift = 0.0, n_drift = 0.0;
  for (const auto& smp : series) {
    e_drift = std::max(e_drift, std::abs(smp.energy - series.front().energy) /
                                    std::max(std::abs(series.front().energy), 1e-300));
    n_drift = std::max(n_drift, std::abs(smp.norm - series.front().norm));
  }
  man.results["mixed_qc"] = {{"mode", backreaction_mode_name(m.mode)},
                             {"mass_ratio", m.m_y / m.m_x},
                             {"y_final", series.back().y},
                             {"p_y_final", series.back().p_y},
                             {"max_relative_energy_drift", e_drift},
                             {"max_norm_drift", n_drift}};
}

}  // namespace

RunResult run_scenario(const Scenario& s, const RunOptions& opt) {
  validate_scenario(s);
  RunResult res;
  res.output_dir = opt.output_root / s.output_dir;
  fs::create_directories(res.output_dir);
  Manifest man(s, res.output_dir);
  const auto t0 = std::chrono::steady_clock::now();
  auto wall = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  man.write(false, "running", 0.0);
  say(opt.log, "run " + s.name + " -> " + res.output_dir.string());
  try {
    if (s.kind == ScenarioKind::mixed_qc)
      run_mixed(s, man);
    else
      run_wavepacket(s, man, opt.log);
    res.complete = true;
  } catch (const std::exception& e) {
    res.error = e.what();
    say(opt.log, "run " + s.name + " failed: " + res.error);
  }
  res.results = man.results;
  res.manifest_hash = man.write(res.complete, res.error, wall());
  return res;
}

SweepResult sweep(const json& doc, const std::string& param, const std::vector<double>& values,
                  const RunOptions& opt, unsigned jobs) {
  if (values.empty()) throw ValidationError("values", "empty value list");
  if (param.empty()) throw ValidationError("param", "empty parameter path");
  const Scenario base = parse_scenario(doc);

  // the path must exist in the base document; individual values may still
  // be invalid, which fails only that point
  {
    json probe = doc;
    set_dotted(probe, param, values.front());
  }
  std::vector<json> points;
  for (double v : values) {
    json d = doc;
    set_dotted(d, param, v);
    d["output_dir"] = base.output_dir + "/" + param + "=" + time_label(v);
    points.push_back(std::move(d));
  }

  SweepResult out;
  out.values = values;
  out.runs.resize(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      out.runs[i].output_dir = opt.output_root / points[i]["output_dir"].get<std::string>();
      try {
        out.runs[i] = run_scenario(parse_scenario(points[i]), opt);
      } catch (const std::exception& e) {
        out.runs[i].error = e.what();
        say(opt.log, param + "=" + time_label(values[i]) + " failed: " + e.what());
      }
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(points.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // final-time ever-crossed fraction of the first region, by ensemble kind
  auto w_bar = [](const json& results, const char* kind) {
    if (!results.contains("fractions")) return std::nan("");
    for (const auto& [region, per] : results["fractions"].items())
      for (const auto& [name, row] : per.items())
        if (row.is_object() && row.value("kind", "") == kind) return row["W_bar_final"].get<double>();
    return std::nan("");
  };
  auto cell = [](double v) { return std::isnan(v) ? std::string() : num(v); };

  out.summary_csv = opt.output_root / base.output_dir / "summary.csv";
  auto f = io::open_output(out.summary_csv);
  f << "value,W_bar_bohm,W_bar_cl_rho0,W_bar_cl_wigner,norm_final,energy_final,status\n";
  out.all_complete = true;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& r = out.runs[i];
    out.all_complete = out.all_complete && r.complete;
    f << num(values[i]) << ',' << cell(w_bar(r.results, "bohmian_rho0")) << ','
      << cell(w_bar(r.results, "classical_rho0")) << ',' << cell(w_bar(r.results, "classical_wigner")) << ','
      << cell(json_number_or_nan(r.results, {"propagation", "norm_final"})) << ','
      << cell(json_number_or_nan(r.results, {"propagation", "energy_final"})) << ','
      << (r.complete ? "complete" : "failed") << '\n';
  }
  f.close();

  // Self-convergence table when every point ends on the same grid at the
  // same time (e.g. a dt sweep at fixed final time).
  std::vector<io::FieldDump> finals;
  for (const auto& r : out.runs) {
    if (!r.complete || !fs::exists(r.output_dir / "psi_final.bin")) break;
    finals.push_back(io::read_field_binary(r.output_dir / "psi_final.bin"));
  }
  if (finals.size() == points.size() && finals.size() >= 2) {
    bool same = true;
    for (const auto& d : finals)
      same = same && d.grid == finals[0].grid && std::abs(d.time - finals[0].time) <= 1e-9 * std::max(1.0, std::abs(d.time));
    if (same) {
      auto c = io::open_output(opt.output_root / base.output_dir / "convergence.csv");
      c << "value,l2_diff_to_next,observed_order\n";
      std::vector<double> diff(finals.size(), std::nan(""));
      const double area = finals[0].grid.cell_area();
      for (std::size_t i = 0; i + 1 < finals.size(); ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < finals[i].complex.size(); ++k)
          acc += std::norm(finals[i].complex[k] - finals[i + 1].complex[k]);
        diff[i] = std::sqrt(acc * area);
      }
      for (std::size_t i = 0; i < finals.size(); ++i) {
        double order = std::nan("");
        if (i + 2 < finals.size() && diff[i] > 0.0 && diff[i + 1] > 0.0)
          order = std::log(diff[i] / diff[i + 1]) / std::log(values[i] / values[i + 1]);
        c << num(values[i]) << ',' << cell(diff[i]) << ',' << cell(order) << '\n';
      }
    }
  }
  return out;
}

}  // namespace bohmflow

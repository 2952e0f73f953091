#include "bohmflow/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace bohmflow {

namespace {

// Object reader that remembers which keys were consumed so that leftovers
// can be reported as unknown.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_.empty() ? "scenario" : path_, "must be an object");
  }

  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  bool has(const std::string& k) const { return j_.contains(k); }

  const json& raw(const std::string& k) {
    if (!j_.contains(k)) throw ValidationError(key(k), "is required");
    used_.insert(k);
    return j_.at(k);
  }

  double num(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_number()) throw ValidationError(key(k), "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ValidationError(key(k), "must be finite");
    return d;
  }
  double num(const std::string& k, double def) { return has(k) ? num(k) : def; }

  std::size_t count(const std::string& k) {
    const json& v = raw(k);
    if (v.is_number_integer() && v.get<long long>() >= 0) return v.get<std::size_t>();
    if (v.is_number_unsigned()) return v.get<std::size_t>();
    throw ValidationError(key(k), "must be a non-negative integer");
  }
  std::size_t count(const std::string& k, std::size_t def) { return has(k) ? count(k) : def; }
  std::size_t positive(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_number_integer() || v.get<long long>() <= 0)
      throw ValidationError(key(k), "must be a positive integer");
    return v.get<std::size_t>();
  }
  std::size_t positive(const std::string& k, std::size_t def) { return has(k) ? positive(k) : def; }

  std::uint64_t u64(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
      throw ValidationError(key(k), "must be a non-negative integer");
    return v.get<std::uint64_t>();
  }

  std::string str(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_string()) throw ValidationError(key(k), "must be a string");
    return v.get<std::string>();
  }
  std::string str(const std::string& k, const std::string& def) { return has(k) ? str(k) : def; }

  bool boolean(const std::string& k, bool def) {
    if (!has(k)) return def;
    const json& v = raw(k);
    if (!v.is_boolean()) throw ValidationError(key(k), "must be true or false");
    return v.get<bool>();
  }

  std::vector<double> nums(const std::string& k) {
    if (!has(k)) return {};
    const json& v = raw(k);
    if (!v.is_array()) throw ValidationError(key(k), "must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ValidationError(key(k) + "[" + std::to_string(i) + "]", "must be a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  Obj sub(const std::string& k) { return Obj(raw(k), key(k)); }

  /// Remaining numeric members as a name -> value map (used for potential
  /// parameters).
  std::map<std::string, double> rest_numbers() {
    std::map<std::string, double> out;
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (used_.count(it.key())) continue;
      out[it.key()] = num(it.key());
    }
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) throw ValidationError(key(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

template <class F>
auto prefixed(const std::string& prefix, F&& f) {
  try {
    return f();
  } catch (const ValidationError& e) {
    std::string what = e.what();
    const auto colon = what.find(": ");
    throw ValidationError(prefix + e.field(), colon == std::string::npos ? what : what.substr(colon + 2));
  }
}

PotentialSurface parse_potential(Obj o) {
  const std::string kind = o.str("kind");
  auto params = o.rest_numbers();
  return PotentialSurface::from_parameters(kind, params);
}

InitialStateSpec parse_initial_state(Obj o) {
  InitialStateSpec s;
  const std::string kind = o.str("kind", "gaussian2d");
  if (kind == "gaussian2d") {
    s.kind = InitialStateSpec::Kind::gaussian2d;
    s.packet.center = {o.num("x0"), o.num("y0")};
    if (o.has("sigma")) {
      const double sg = o.num("sigma");
      s.packet.widths = {sg, sg};
    } else {
      s.packet.widths = {o.num("sigma_x"), o.num("sigma_y")};
    }
    if (o.has("p0")) {
      // the reactive-scattering convention: momentum (-p0, p0)
      const double p0 = o.num("p0");
      s.packet.momenta = {-p0, p0};
    } else {
      s.packet.momenta = {o.num("px0", 0.0), o.num("py0", 0.0)};
    }
    if (!(s.packet.widths[0] > 0.0) || !(s.packet.widths[1] > 0.0))
      throw ValidationError(o.key("sigma"), "must be positive");
  } else if (kind == "quasi_plane") {
    s.kind = InitialStateSpec::Kind::quasi_plane;
    auto& q = s.quasi_plane;
    q.x0 = o.num("x0", -400.0);
    q.y_center = o.num("y_center", 0.0);
    q.energy = o.num("energy");
    q.n_copies = o.positive("n_copies");
    q.spacing = o.num("spacing", 0.0);
    q.sigma_x = o.num("sigma_x");
    q.sigma_y = o.num("sigma_y");
    s.packet.center = {q.x0, q.y_center};
    s.packet.widths = {q.sigma_x, q.sigma_y};
  } else {
    throw ValidationError(o.key("kind"), "must be gaussian2d or quasi_plane");
  }
  o.finish();
  return s;
}

PropagationParams parse_propagation(Obj o) {
  PropagationParams p;
  p.dt = o.num("dt");
  if (!(p.dt > 0.0)) throw ValidationError("propagation.dt", "must be positive");
  // a fixed final time lets dt be swept
  if (o.has("t_final")) {
    if (o.has("n_steps")) throw ValidationError("propagation.t_final", "give either n_steps or t_final");
    const double t = o.num("t_final");
    const double n = std::round(t / p.dt);
    if (!(n >= 1.0) || std::abs(n * p.dt - t) > 1e-9 * t)
      throw ValidationError("propagation.t_final", "must be a positive multiple of dt");
    p.n_steps = static_cast<std::size_t>(n);
  } else {
    p.n_steps = o.count("n_steps");
  }
  p.save_every = o.count("save_every", 1);
  if (o.has("absorber")) {
    Obj a = o.sub("absorber");
    p.absorber.width_x = a.num("width_x", 0.0);
    p.absorber.width_y = a.num("width_y", 0.0);
    p.absorber.strength = a.num("strength", 0.0);
    a.finish();
  }
  o.finish();
  if (!(p.dt > 0.0)) throw ValidationError("propagation.dt", "must be positive");
  if (p.n_steps == 0) throw ValidationError("propagation.n_steps", "must be positive");
  if (p.save_every == 0) throw ValidationError("propagation.save_every", "must be positive");
  return p;
}

RegionSpec parse_region(Obj o) {
  RegionSpec r;
  r.kind = parse_region_kind(o.str("kind"));
  r.a = o.num("a", 0.0);
  r.b = o.num("b", 0.0);
  o.finish();
  return r;
}

void parse_observables(const json& arr, Scenario& s) {
  if (!arr.is_array()) throw ValidationError("observables", "must be an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    Obj o(arr[i], "observables[" + std::to_string(i) + "]");
    const std::string kind = o.str("kind");
    if (kind == "fractions") {
      FractionsObservable f;
      f.name = o.str("name", "fractions");
      f.region = parse_region(o.sub("region"));
      for (const auto& other : s.fractions)
        if (other.name == f.name) throw ValidationError(o.key("name"), "duplicate fractions name");
      s.fractions.push_back(f);
    } else if (kind == "angular") {
      AngularSpec a;
      const auto origin = o.nums("origin");
      if (!origin.empty()) {
        if (origin.size() != 2) throw ValidationError(o.key("origin"), "must have two entries");
        a.origin = {origin[0], origin[1]};
      }
      a.x_threshold = o.num("x_threshold", 0.0);
      a.bin_width_deg = o.num("bin_width_deg", 1.0);
      s.angular = a;
    } else if (kind == "arrow_map") {
      ArrowMapObservable m;
      m.times = o.nums("times");
      m.decimation = o.positive("decimation", 8);
      s.arrow_map = m;
    } else if (kind == "energy") {
      s.energy = true;
    } else if (kind == "reduced") {
      ReducedObservable r;
      const std::string axis = o.str("traced_axis", "y");
      if (axis != "x" && axis != "y") throw ValidationError(o.key("traced_axis"), "must be x or y");
      r.traced = axis == "x" ? Axis::x : Axis::y;
      r.times = o.nums("times");
      s.reduced = r;
    } else if (kind == "analytic_free") {
      s.analytic_free = true;
    } else {
      throw ValidationError(o.key("kind"), "unknown observable '" + kind + "'");
    }
    o.finish();
  }
}

MixedSpec parse_mixed(Obj o) {
  MixedSpec m;
  Obj g = o.sub("grid");
  m.grid = prefixed("mixed_qc.", [&] { return Grid1D(g.count("n"), g.num("x_min"), g.num("x_max")); });
  g.finish();
  m.m_x = o.num("m_x");
  m.m_y = o.num("m_y");
  m.x0 = o.num("x0", 0.0);
  m.sigma = o.num("sigma");
  m.px0 = o.num("px0", 0.0);
  m.y0 = o.num("y0", 0.0);
  m.p_y0 = o.num("p_y0", 0.0);
  m.dt = o.num("dt");
  m.n_steps = o.count("n_steps");
  m.sample_every = o.positive("sample_every", 1);
  m.mode = parse_backreaction_mode(o.str("mode", "expectation"));
  m.x_traj0 = o.num("x_traj0", m.x0);
  o.finish();
  if (!(m.m_x > 0.0)) throw ValidationError("mixed_qc.m_x", "must be positive");
  if (!(m.sigma > 0.0)) throw ValidationError("mixed_qc.sigma", "must be positive");
  if (!(m.dt > 0.0)) throw ValidationError("mixed_qc.dt", "must be positive");
  if (m.n_steps == 0) throw ValidationError("mixed_qc.n_steps", "must be positive");
  return m;
}

}  // namespace

Scenario parse_scenario(const json& doc) {
  Obj top(doc, "");
  Scenario s;
  s.source = doc;
  s.name = top.str("name");
  if (s.name.empty()) throw ValidationError("name", "must not be empty");
  const std::string kind = top.str("kind", "wavepacket");
  if (kind == "wavepacket")
    s.kind = ScenarioKind::wavepacket;
  else if (kind == "mixed_qc")
    s.kind = ScenarioKind::mixed_qc;
  else
    throw ValidationError("kind", "must be wavepacket or mixed_qc");
  s.seed = top.u64("seed");
  s.output_dir = top.str("output_dir", s.name);
  if (s.output_dir.empty()) throw ValidationError("output_dir", "must not be empty");
  s.potential = parse_potential(top.sub("potential"));

  if (s.kind == ScenarioKind::mixed_qc) {
    s.mixed = parse_mixed(top.sub("mixed_qc"));
    top.finish();
    return s;
  }

  Obj g = top.sub("grid");
  s.grid = Grid2D(g.count("nx"), g.count("ny"), g.num("x_min"), g.num("x_max"), g.num("y_min"),
                  g.num("y_max"));
  g.finish();
  s.mass = top.num("mass");
  if (!(s.mass > 0.0)) throw ValidationError("mass", "must be positive");
  s.initial_state = parse_initial_state(top.sub("initial_state"));
  s.propagation = parse_propagation(top.sub("propagation"));
  s.classical_substeps = top.positive("classical_substeps", 1);

  if (top.has("sampling")) {
    const json& arr = top.raw("sampling");
    if (!arr.is_array()) throw ValidationError("sampling", "must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Obj o(arr[i], "sampling[" + std::to_string(i) + "]");
      SamplingEntry e;
      const std::string kname = o.str("kind");
      try {
        e.spec.kind = parse_sampling_kind(kname);
      } catch (const ValidationError&) {
        throw ValidationError(o.key("kind"), "unknown sampling kind '" + kname + "'");
      }
      e.spec.n = o.count("n");
      if (e.spec.n == 0) throw ValidationError(o.key("n"), "must be positive");
      e.spec.seed = o.has("seed") ? o.u64("seed") : s.seed + i;
      e.name = o.str("name", std::string(sampling_kind_name(e.spec.kind)));
      o.finish();
      for (const auto& other : s.sampling)
        if (other.name == e.name) throw ValidationError(o.key("name"), "duplicate sampling name");
      s.sampling.push_back(e);
    }
  }
  if (top.has("observables")) parse_observables(top.raw("observables"), s);
  if (top.has("output")) {
    Obj o = top.sub("output");
    s.output.record_every = o.positive("record_every", 1);
    s.output.dump_times = o.nums("dump_times");
    s.output.trajectory_stride = o.positive("trajectory_stride", 1);
    s.output.frame_stride = o.positive("frame_stride", 1);
    o.finish();
  }
  top.finish();
  return s;
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("scenario", "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("scenario", std::string("JSON syntax error: ") + e.what());
  }
}

Scenario load_scenario(const std::filesystem::path& path) { return parse_scenario(load_json_file(path)); }

namespace {

void check_times(const std::vector<double>& times, double t_end, const std::string& field) {
  for (double t : times)
    if (t < 0.0 || t > t_end * (1.0 + 1e-12))
      throw ValidationError(field, "time " + std::to_string(t) + " outside [0, " + std::to_string(t_end) + "]");
}

}  // namespace

void validate_scenario(const Scenario& s) {
  if (s.kind == ScenarioKind::mixed_qc) {
    const auto& m = *s.mixed;
    MixedState st;
    st.psi = WaveField1D(m.grid, std::vector<cplx>(m.grid.size(), cplx(1.0)), m.m_x);
    st.m_y = m.m_y;
    MixedIntegrator probe(st, s.potential, m.dt, m.mode);
    (void)probe;
    const double edge = std::min(m.x0 - m.grid.x_min(), m.grid.x_max() - m.grid.dx() - m.x0);
    if (edge < 0.0 || std::exp(-edge * edge / (2.0 * m.sigma * m.sigma)) > kBoundaryDensityLimit)
      throw ValidationError("mixed_qc.sigma", "packet not inside the grid");
    return;
  }

  s.propagation.validate(s.grid);
  if (s.propagation.n_steps % s.propagation.save_every != 0)
    throw ValidationError("propagation.save_every", "must divide n_steps");
  if ((s.propagation.n_steps / s.propagation.save_every) % s.output.record_every != 0)
    throw ValidationError("output.record_every", "must divide the number of saved snapshots");
  const double t_end = s.propagation.dt * static_cast<double>(s.propagation.n_steps);
  if (s.initial_state.kind == InitialStateSpec::Kind::gaussian2d)
    (void)make_gaussian(s.grid, s.initial_state.packet.center, s.initial_state.packet.widths,
                        s.initial_state.packet.momenta, s.mass);
  else
    (void)make_quasi_plane(s.grid, s.initial_state.quasi_plane, s.mass, s.potential);

  for (std::size_t i = 0; i < s.sampling.size(); ++i)
    if (s.sampling[i].spec.kind == SamplingKind::classical_wigner &&
        s.initial_state.kind != InitialStateSpec::Kind::gaussian2d)
      throw ValidationError("sampling[" + std::to_string(i) + "].kind",
                            "Wigner sampling needs a gaussian2d initial state");

  const auto& ab = s.propagation.absorber;
  if (ab.enabled() && s.potential.kind() == SurfaceKind::double_slit) {
    // slit region: where the barrier envelope exceeds e^-9 and |y| is within
    // twice the slit-centre offset
    const auto& p = s.potential.parameters();
    const double half_x = 3.0 * p.at("alpha");
    const double half_y = 2.0 * 2.0 * std::sqrt(p.at("v0") / p.at("mass")) / p.at("omega");
    const Grid2D& g = s.grid;
    const bool x_clear = ab.width_x <= 0.0 ||
                         (g.x_min() + ab.width_x < -half_x && g.x_max() - ab.width_x > half_x);
    const bool y_clear = ab.width_y <= 0.0 ||
                         (g.y_min() + ab.width_y < -half_y && g.y_max() - ab.width_y > half_y);
    if (!x_clear) throw ValidationError("propagation.absorber.width_x", "absorber overlaps the slit region");
    if (!y_clear) throw ValidationError("propagation.absorber.width_y", "absorber overlaps the slit region");
  }

  check_times(s.output.dump_times, t_end, "output.dump_times");
  if (s.arrow_map) check_times(s.arrow_map->times, t_end, "observables.arrow_map.times");
  if (s.reduced) {
    check_times(s.reduced->times, t_end, "observables.reduced.times");
    const std::size_t n = s.reduced->traced == Axis::y ? s.grid.nx() : s.grid.ny();
    if (n > kMaxReducedSize)
      throw ValidationError("observables.reduced.traced_axis", "retained axis exceeds 512 points");
  }
  if (s.analytic_free && s.potential.kind() != SurfaceKind::free)
    throw ValidationError("observables.analytic_free", "needs the free potential");
  if (s.analytic_free && s.initial_state.kind != InitialStateSpec::Kind::gaussian2d)
    throw ValidationError("observables.analytic_free", "needs a gaussian2d initial state");
}

std::string canonical_json(const json& doc) { return doc.dump(); }

void set_dotted(json& doc, const std::string& path, double value, bool create) {
  if (path.empty()) throw ValidationError("param", "empty parameter path");
  std::vector<std::string> parts;
  std::stringstream ss(path);
  for (std::string p; std::getline(ss, p, '.');) parts.push_back(p);
  json* cur = &doc;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const std::string& p = parts[i];
    const bool last = i + 1 == parts.size();
    if (cur->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(p);
      } catch (const std::exception&) {
        throw ValidationError(path, "'" + p + "' is not an array index");
      }
      if (idx >= cur->size()) throw ValidationError(path, "array index out of range");
      cur = &(*cur)[idx];
    } else if (cur->is_object()) {
      if (!cur->contains(p)) {
        if (!(create && last)) throw ValidationError(path, "no such key '" + p + "'");
        (*cur)[p] = value;
        return;
      }
      cur = &(*cur)[p];
    } else {
      throw ValidationError(path, "'" + p + "' is not inside an object or array");
    }
    if (last) {
      if (!cur->is_number()) throw ValidationError(path, "does not address a number");
      if (cur->is_number_integer() && value == std::floor(value) && std::abs(value) < 9e15)
        *cur = static_cast<long long>(value);
      else
        *cur = value;
    }
  }
}

}  // namespace bohmflow

// Acceptance checks: one PASS/FAIL line per criterion. The heavy runs write
// under $BOHMFLOW_OUTPUT_ROOT/acceptance. Exit status is the number of
// failed criteria (capped at 100).
//
//   bohmflow_acceptance [criterion...] [-v]

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "bohmflow/hydro.hpp"
#include "bohmflow/mixed_qc.hpp"
#include "bohmflow/presets.hpp"
#include "bohmflow/propagator.hpp"
#include "bohmflow/reduced.hpp"
#include "bohmflow/runner.hpp"

using namespace bohmflow;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

// Columns of a CSV file by header name; empty cells read as NaN.
std::map<std::string, std::vector<double>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<std::string> names;
  {
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) names.push_back(c);
  }
  std::map<std::string, std::vector<double>> cols;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string c;
    for (const auto& n : names) {
      if (!std::getline(ss, c, ',')) c.clear();
      cols[n].push_back(c.empty() ? std::nan("") : std::stod(c));
    }
  }
  return cols;
}

class Acceptance {
 public:
  Acceptance(fs::path root, std::ostream* log) : root_(std::move(root)) { opt_.output_root = root_; opt_.log = log; }

  Outcome unitarity() {
    const auto& r = free_run();
    const auto& p = r.results.at("propagation");
    const double dn = p.at("max_norm_drift"), de = p.at("max_relative_energy_drift");
    return {dn < 1e-10 && de < 1e-8 && free_seconds_ < 60.0,
            "norm drift " + fmt(dn) + ", energy drift " + fmt(de) + ", " + fmt(free_seconds_) + " s"};
  }

  Outcome analytic_oracle() {
    const auto& a = free_run().results.at("analytic_free");
    const double w = a.at("max_relative_width_error");
    const auto& b = a.at("ensembles").at("bohmian_rho0");
    const double x = b.at("max_abs_error");
    const std::size_t masked = b.at("masked");
    return {w < 1e-6 && x < 1e-4 && masked == 0,
            "width error " + fmt(w) + ", trajectory error " + fmt(x) + ", masked " + std::to_string(masked)};
  }

  // Q + V equals the eigenenergy hbar (wx + wy) / 2 of the 2D ground state
  Outcome stationary_identity() {
    const Grid2D g(128, 128, -10, 10, -10, 10);
    double worst = 0.0;
    std::size_t nodes = 0;
    for (const auto& [wx, wy] : {std::pair{1.0, 1.0}, std::pair{1.0, 1.6}}) {
      const double m = 1.0;
      const auto V = PotentialSurface::harmonic2d(m * wx * wx, m * wy * wy);
      const auto psi = make_gaussian(g, {0, 0}, {std::sqrt(kHbar / (2 * m * wx)), std::sqrt(kHbar / (2 * m * wy))},
                                     {0, 0}, m);
      const auto Q = quantum_potential(psi);
      const auto v = V.sample(g);
      const double e = kHbar * (wx + wy) / 2;
      for (std::size_t i = 0; i < g.nx(); ++i)
        for (std::size_t j = 0; j < g.ny(); ++j) {
          const std::size_t k = g.index(i, j);
          if (Q.masked[k] || std::hypot(g.x(i), g.y(j)) > 4.0) continue;
          worst = std::max(worst, std::abs(Q.values[k] + v[k] - e));
          ++nodes;
        }
    }
    return {worst < 1e-6 && nodes > 1000, "max |Q + V - E| " + fmt(worst) + " on " + std::to_string(nodes) + " nodes"};
  }

  Outcome separability() {
    // product state: Q splits into Q1(x) + Q2(y)
    const Grid2D g(64, 64, -10, 10, -10, 10);
    const auto prod = make_gaussian(g, {0.5, -1.0}, {0.9, 1.1}, {0.4, -0.2}, 1.0);
    const double res = q_separability_residual(prod);

    // reduced trajectories of a product state against 1D Bohmian trajectories
    const Grid2D g2(128, 64, -12, 12, -6, 6);
    const double m = 1.0, kx = 0.4, dt = 0.01;
    const auto V = PotentialSurface::harmonic2d(kx, 1.0);
    WaveField psi = make_gaussian(g2, {-1.5, 0.3}, {0.8, 0.6}, {0.7, -0.2}, m);
    SplitOperator op(g2, V, m, dt);
    const Grid1D gx = x_axis(g2);
    std::vector<cplx> line(gx.size());
    for (std::size_t i = 0; i < gx.size(); ++i) {
      const double u = gx.x(i) + 1.5;
      line[i] = std::exp(-u * u / (4 * 0.64)) * std::polar(1.0, 0.7 * gx.x(i));
    }
    WaveField1D psi1(gx, line, m);
    psi1.normalize();
    SplitOperator1D op1(gx, m, dt);
    std::vector<double> vx(gx.size());
    for (std::size_t i = 0; i < gx.size(); ++i) vx[i] = 0.5 * kx * gx.x(i) * gx.x(i);
    op1.set_potential(vx);
    std::vector<ReducedVelocity> red;
    std::vector<VelocitySnapshot1D> direct;
    for (int s = 0; s <= 400; ++s) {
      if (s > 0) {
        op.step(psi);
        op1.step(psi1);
      }
      red.push_back(reduced_velocity(partial_trace(psi)));
      direct.push_back(velocity_1d(psi1, op1.fft()));
    }
    std::vector<double> x0;
    for (int k = 0; k < 21; ++k) x0.push_back(-3.5 + 0.2 * k);
    const auto a = integrate_reduced(x0, red);
    const auto b = integrate_1d(x0, direct);
    double err = 0.0;
    for (std::size_t f = 0; f < a.times.size(); ++f)
      for (std::size_t k = 0; k < x0.size(); ++k) err = std::max(err, std::abs(a.at(f, k) - b.at(f, k)));
    const bool ok = res < 1e-8 && err < 1e-6 && a.masked_count() == 0;
    return {ok, "Q residual " + fmt(res) + ", reduced vs 1D trajectories " + fmt(err)};
  }

  Outcome ensemble_field() {
    const auto& r = mb_run(10.0);
    const auto& fr = r.results.at("fractions").at("products").at("bohmian_rho0");
    const double n = fr.at("n_used");
    const auto c = read_csv(r.output_dir / "fractions_products_bohmian_rho0.csv");
    double sup = 0.0, p_star = 0.0, excess = -1.0;
    for (std::size_t f = 0; f < c.at("t").size(); ++f) {
      const double W = c.at("W")[f], P = c.at("P")[f];
      const double d = std::abs(W - P);
      if (d > sup) {
        sup = d;
        p_star = P;
      }
      excess = std::max(excess, d - 3 * std::sqrt(P * (1 - P) / n));
    }
    const double band = 3 * std::sqrt(p_star * (1 - p_star) / n);
    return {sup <= band, "sup |W - P| " + fmt(sup) + " vs 3 sqrt(P(1-P)/N) " + fmt(band) + " (N " + fmt(n) +
                             "); largest pointwise excess " + fmt(excess)};
  }

  Outcome ordering_p0_4() {
    json d = preset("mueller-brown-p0-4");
    d["output_dir"] = "ordering-p0-4";
    for (std::size_t i = 0; i < d["sampling"].size(); ++i) d["sampling"][i]["n"] = 5000;
    const auto r = run_scenario(parse_scenario(d), opt_);
    if (!r.complete) return {false, "run failed: " + r.error};
    const auto& fr = r.results.at("fractions").at("products");
    const double wb = fr.at("bohmian_rho0").at("W_final"), wr = fr.at("classical_rho0").at("W_final"),
                 ww = fr.at("classical_wigner").at("W_final");
    return {ww > wb && wb > wr,
            "W(Wigner) " + fmt(ww) + " > W(Bohm) " + fmt(wb) + " > W(rho0) " + fmt(wr) + " at N = 5000"};
  }

  Outcome crossover() {
    std::vector<double> p0, diff;
    std::string text;
    for (double v : {4.0, 6.0, 8.0, 10.0}) {
      const auto& fr = mb_run(v).results.at("fractions").at("products");
      const double dv = fr.at("bohmian_rho0").at("W_bar_final").get<double>() -
                        fr.at("classical_wigner").at("W_bar_final").get<double>();
      p0.push_back(v);
      diff.push_back(dv);
      text += (text.empty() ? "" : ", ") + fmt(v) + ": " + fmt(dv);
    }
    double zero = std::nan("");
    for (std::size_t i = 0; i + 1 < p0.size() && std::isnan(zero); ++i)
      if ((diff[i] < 0) != (diff[i + 1] < 0))
        zero = p0[i] + (p0[i + 1] - p0[i]) * diff[i] / (diff[i] - diff[i + 1]);
    const bool flips = (diff.front() < 0) != (diff.back() < 0);
    return {flips && zero >= 6.0 && zero <= 10.0,
            "W_bar(Bohm) - W_bar(Wigner) by p0 {" + text + "}, zero near p0 = " + fmt(zero)};
  }

  Outcome non_crossing() {
    const auto r = run_scenario(parse_scenario(preset("double-slit-500")), opt_);
    if (!r.complete) return {false, "run failed: " + r.error};
    const auto& an = r.results.at("angular");
    const auto& e = an.at("ensembles").at("bohmian_rho0");
    const std::size_t upper = e.at("started_upper"), crossed = e.at("crossed_upper_to_lower");
    const double n = e.at("counted");
    const auto c = read_csv(r.output_dir / "angular_bohmian_rho0.csv");
    const auto& I = c.at("intensity");
    double worst = 0.0;  // largest |I(theta) - I(-theta)| in units of its MC error
    std::size_t uneven = 0;
    for (std::size_t k = 0; k < I.size() / 2; ++k) {
      const double a = I[k], b = I[I.size() - 1 - k];
      const double err = std::sqrt((a * (1 - a) + b * (1 - b)) / n);
      if (a == b) continue;
      const double z = std::abs(a - b) / err;
      worst = std::max(worst, z);
      uneven += z > 3.0;
    }
    const double fringe = an.value("fringe_relative_error", std::nan(""));
    const bool ok = upper >= 1000 && crossed == 0 && uneven == 0 && fringe < 0.10;
    return {ok, std::to_string(crossed) + " of " + std::to_string(upper) + " upper trajectories crossed; worst bin asymmetry " +
                    fmt(worst) + " sigma over " + fmt(n) + " counted; fringe spacing error " + fmt(fringe)};
  }

  // Oracle: the full two-dimensional problem in the mass-weighted heavy
  // coordinate y' = y sqrt(m_y / m_x), which turns it into an equal-mass
  // problem on a harmonic2d surface.
  Outcome mixed_qc() {
    const Scenario s = parse_scenario(preset("mixed-qc-harmonic"));
    const MixedSpec& ms = *s.mixed;
    const auto& pp = s.potential.parameters();
    const double kx = pp.at("kx"), ky = pp.at("ky"), c = pp.at("coupling");
    if (pp.at("x0") != 0.0 || pp.at("y0") != 0.0 || ms.m_x != 1.0)
      return {false, "oracle assumes an origin-centred surface and m_x = 1"};
    const double mu = ms.m_y / ms.m_x, r = std::sqrt(mu);
    const double omega_y = std::sqrt(ky / ms.m_y);
    // heavy packet: ground-state width of its own oscillator
    const double sy = std::sqrt(kHbar / (2 * ms.m_y * omega_y)) * r;
    const double y0 = ms.y0 * r;
    const Grid1D& gx = ms.grid;
    const Grid2D g2(gx.size(), 64, gx.x_min(), gx.x_max(), y0 - 50.0, y0 + 50.0);
    WaveField full = make_gaussian(g2, {ms.x0, y0}, {ms.sigma, sy}, {ms.px0, ms.p_y0 / r}, ms.m_x);
    SplitOperator op(g2, PotentialSurface::harmonic2d(kx, ky / mu, 0, 0, c / r), ms.m_x, ms.dt);

    std::vector<cplx> line(gx.size());
    for (std::size_t i = 0; i < gx.size(); ++i) {
      const double u = gx.x(i) - ms.x0;
      line[i] = std::exp(-u * u / (4 * ms.sigma * ms.sigma)) * std::polar(1.0, ms.px0 * gx.x(i));
    }
    WaveField1D light(gx, line, ms.m_x);
    light.normalize();
    MixedIntegrator it(MixedState{light, ms.y0, ms.p_y0, ms.m_y, ms.x_traj0}, s.potential, ms.dt, ms.mode);

    const double period = 2 * std::numbers::pi / std::sqrt(kx / ms.m_x);
    const auto steps = static_cast<std::size_t>(std::ceil(period / ms.dt));
    double worst = 0.0;
    for (std::size_t k = 0; k <= steps; ++k) {
      if (k > 0) {
        op.step(full);
        it.step();
      }
      if (k % 10 != 0 && k != steps) continue;
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < gx.size(); ++i) {
        double marg = 0.0;
        for (std::size_t j = 0; j < g2.ny(); ++j) marg += std::norm(full(i, j));
        marg *= g2.dy();
        const double mixed = std::norm(it.state().psi[i]);
        num += (marg - mixed) * (marg - mixed);
        den += marg * marg;
      }
      worst = std::max(worst, std::sqrt(num / den));
    }

    // separable surface: the light wave must not feel the heavy coordinate
    const auto sep = PotentialSurface::harmonic2d(kx, ky);
    MixedIntegrator a(MixedState{light, ms.y0, ms.p_y0, ms.m_y, ms.x_traj0}, sep, ms.dt, ms.mode);
    WaveField1D alone = light;
    SplitOperator1D op1(gx, ms.m_x, ms.dt);
    std::vector<double> vx(gx.size());
    for (std::size_t i = 0; i < gx.size(); ++i) vx[i] = 0.5 * kx * gx.x(i) * gx.x(i);
    op1.set_potential(vx);
    for (std::size_t k = 0; k < steps; ++k) {
      a.step();
      op1.step(alone);
    }
    const cplx phase = a.state().psi[gx.size() / 2] / alone[gx.size() / 2];
    double dec = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i) dec = std::max(dec, std::abs(a.state().psi[i] - phase * alone[i]));
    return {worst < 0.05 && dec < 1e-10,
            "x-density relative L2 vs 2D oracle " + fmt(worst) + " over one light period; separable decoupling " +
                fmt(dec)};
  }

  Outcome wigner_energy() {
    const auto& e = mb_run(10.0).results.at("energy");
    const double T = e.at("translational"), V = e.at("v_bar"), D = e.at("delta_bar");
    const auto& w = e.at("ensembles").at("classical_wigner");
    const auto& r = e.at("ensembles").at("classical_rho0");
    const double dw = w.at("mean").get<double>() - (T + V), sw = w.at("std_error");
    const double dr = r.at("mean").get<double>() - (T + V), sr = r.at("std_error");
    const double kin = r.at("kinetic");
    const bool ok = std::abs(dw - D) <= 3 * sw && std::abs(dr) <= 3 * sr && std::abs(kin - T) <= 1e-12 * std::abs(T);
    return {ok, "Wigner excess " + fmt(dw) + " vs delta_bar " + fmt(D) + " (se " + fmt(sw) + "); rho0 excess " +
                    fmt(dr) + " (se " + fmt(sr) + "), rho0 kinetic - translational " + fmt(kin - T)};
  }

 private:
  const RunResult& free_run() {
    if (!free_) {
      const auto t0 = std::chrono::steady_clock::now();
      free_ = run_scenario(parse_scenario(preset("free-gaussian-oracle")), opt_);
      free_seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (!free_->complete) throw std::runtime_error("free-gaussian run failed: " + free_->error);
    }
    return *free_;
  }

  // The p0 sweep is run once and shared by the criteria that need it.
  const RunResult& mb_run(double p0) {
    if (mb_.empty()) {
      json d = preset("mueller-brown");
      d["output_dir"] = "mueller-brown";
      const auto sw = sweep(d, "initial_state.p0", {4.0, 6.0, 8.0, 10.0}, opt_);
      for (std::size_t i = 0; i < sw.values.size(); ++i) mb_[sw.values[i]] = sw.runs[i];
    }
    const auto& r = mb_.at(p0);
    if (!r.complete) throw std::runtime_error("p0 = " + fmt(p0) + " run failed: " + r.error);
    return r;
  }

  fs::path root_;
  RunOptions opt_;
  std::optional<RunResult> free_;
  double free_seconds_ = 0.0;
  std::map<double, RunResult> mb_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<std::string> only;
  bool verbose = false;
  app.add_option("criteria", only, "Run only these criteria");
  app.add_flag("-v,--verbose", verbose, "Progress messages");
  CLI11_PARSE(app, argc, argv);

  Acceptance acc(default_output_root() / "acceptance", verbose ? &std::cerr : nullptr);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"unitarity", [&] { return acc.unitarity(); }},
      {"analytic_oracle", [&] { return acc.analytic_oracle(); }},
      {"stationary_identity", [&] { return acc.stationary_identity(); }},
      {"separability", [&] { return acc.separability(); }},
      {"ensemble_field", [&] { return acc.ensemble_field(); }},
      {"ordering_p0_4", [&] { return acc.ordering_p0_4(); }},
      {"crossover", [&] { return acc.crossover(); }},
      {"non_crossing", [&] { return acc.non_crossing(); }},
      {"mixed_qc", [&] { return acc.mixed_qc(); }},
      {"wigner_energy", [&] { return acc.wigner_energy(); }},
  };
  for (const auto& name : only) {
    bool known = false;
    for (const auto& c : criteria) known |= c.first == name;
    if (!known) {
      std::cerr << "unknown criterion '" << name << "'\n";
      return 2;
    }
  }

  int failed = 0;
  for (const auto& [name, run] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << " [" << fmt(sec) << " s]" << std::endl;
  }
  return std::min(failed, 100);
}

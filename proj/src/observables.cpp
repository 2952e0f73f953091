#include "bohmflow/observables.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <numeric>

#include "bohmflow/field_io.hpp"
#include "bohmflow/propagator.hpp"

namespace bohmflow {

std::string_view region_kind_name(RegionKind k) noexcept {
  return k == RegionKind::half_plane_above_line ? "half_plane_above_line" : "half_plane_x_positive";
}

RegionKind parse_region_kind(std::string_view name) {
  for (auto k : {RegionKind::half_plane_above_line, RegionKind::half_plane_x_positive})
    if (region_kind_name(k) == name) return k;
  throw ValidationError("region.kind", "unknown kind '" + std::string(name) + "'");
}

double restricted_norm(const WaveField& psi, const RegionSpec& region) {
  const Grid2D& g = psi.grid();
  const auto v = psi.values();
  double s = 0.0;
  for (std::size_t i = 0; i < g.nx(); ++i)
    for (std::size_t j = 0; j < g.ny(); ++j)
      if (region.contains(g.x(i), g.y(j))) s += std::norm(v[g.index(i, j)]);
  return s * g.cell_area();
}

FractionSeries fraction_series(const TrajectoryEnsemble& e, const RegionSpec& region,
                               std::span<const double> P) {
  if (!P.empty() && P.size() != e.frames())
    throw ValidationError("P", "needs one value per ensemble frame");
  FractionSeries s;
  s.times = e.times;
  s.P.assign(P.begin(), P.end());
  s.n_masked = e.masked_count();
  s.n_used = e.n - s.n_masked;
  std::vector<std::uint8_t> ever(e.n, 0);
  s.W.reserve(e.frames());
  s.W_bar.reserve(e.frames());
  for (std::size_t f = 0; f < e.frames(); ++f) {
    std::size_t now = 0, seen = 0;
    for (std::size_t k = 0; k < e.n; ++k) {
      if (!e.usable(k)) continue;
      const auto& p = e.at(f, k);
      if (region.contains(p[0], p[1])) {
        ++now;
        ever[k] = 1;
      }
      seen += ever[k];
    }
    const double n = s.n_used ? static_cast<double>(s.n_used) : 1.0;
    s.W.push_back(static_cast<double>(now) / n);
    s.W_bar.push_back(static_cast<double>(seen) / n);
  }
  return s;
}

void write_fraction_csv(const std::filesystem::path& path, const FractionSeries& s) {
  auto out = io::open_output(path);
  out << std::setprecision(12) << "t,W,W_bar,P\n";
  for (std::size_t f = 0; f < s.times.size(); ++f) {
    out << s.times[f] << ',' << s.W[f] << ',' << s.W_bar[f] << ',';
    if (!s.P.empty()) out << s.P[f];
    out << '\n';
  }
}

EnergyEstimate mean_energy(const InitialConditions& ic, const PotentialSurface& v, double mass) {
  const std::size_t n = ic.position.size();
  if (n == 0 || ic.momentum.size() != n) throw ValidationError("initial_conditions", "empty or inconsistent");
  double sum = 0, sum2 = 0, kin = 0, pot = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& p = ic.momentum[k];
    const double t = (p[0] * p[0] + p[1] * p[1]) / (2.0 * mass);
    const double u = v.value(ic.position[k][0], ic.position[k][1]);
    kin += t;
    pot += u;
    sum += t + u;
    sum2 += (t + u) * (t + u);
  }
  const double dn = static_cast<double>(n);
  EnergyEstimate e;
  e.mean = sum / dn;
  e.kinetic = kin / dn;
  e.potential = pot / dn;
  const double var = n > 1 ? std::max(0.0, (sum2 - dn * e.mean * e.mean) / (dn - 1.0)) : 0.0;
  e.std_error = std::sqrt(var / dn);
  return e;
}

double mean_energy(const WaveField& psi, const PotentialSurface& v) {
  return energy_expectation(psi, v);
}

GaussianEnergyTerms gaussian_energy_terms(const WaveField& psi0, const GaussianPacket& packet,
                                          const PotentialSurface& v) {
  const double m = psi0.mass();
  GaussianEnergyTerms t;
  t.translational =
      (packet.momenta[0] * packet.momenta[0] + packet.momenta[1] * packet.momenta[1]) / (2.0 * m);
  t.v_bar = potential_energy(psi0, v.sample(psi0.grid()));
  t.delta_bar = kHbar * kHbar / (8.0 * m) *
                (1.0 / (packet.widths[0] * packet.widths[0]) + 1.0 / (packet.widths[1] * packet.widths[1]));
  return t;
}

namespace {

struct Binner {
  double width;
  std::size_t nbins;
  std::vector<double> acc;

  explicit Binner(double w) : width(w) {
    if (!(w > 0.0) || w > 180.0) throw ValidationError("angular.bin_width_deg", "must be in (0, 180]");
    const double n = 180.0 / w;
    if (std::abs(n - std::round(n)) > 1e-9)
      throw ValidationError("angular.bin_width_deg", "must divide 180 evenly");
    nbins = static_cast<std::size_t>(std::llround(n));
    acc.assign(nbins, 0.0);
  }

  void add(double theta_deg, double weight) {
    const double b = (theta_deg + 90.0) / width;
    const double r = std::round(b);
    if (std::abs(b - r) < 1e-9) {
      const auto k = static_cast<long long>(r);
      if (k - 1 >= 0 && k - 1 < static_cast<long long>(nbins)) acc[k - 1] += 0.5 * weight;
      if (k >= 0 && k < static_cast<long long>(nbins)) acc[k] += 0.5 * weight;
      if (k == 0) acc[0] += 0.5 * weight;
      if (k == static_cast<long long>(nbins)) acc[nbins - 1] += 0.5 * weight;
      return;
    }
    const auto k = std::clamp<long long>(static_cast<long long>(std::floor(b)), 0,
                                         static_cast<long long>(nbins) - 1);
    acc[static_cast<std::size_t>(k)] += weight;
  }

  AngularDistribution finish() const {
    AngularDistribution d;
    d.bin_width_deg = width;
    d.theta_deg.resize(nbins);
    for (std::size_t k = 0; k < nbins; ++k) d.theta_deg[k] = -90.0 + (static_cast<double>(k) + 0.5) * width;
    d.total = std::accumulate(acc.begin(), acc.end(), 0.0);
    d.empty = !(d.total > 0.0);
    d.intensity.assign(nbins, 0.0);
    if (!d.empty)
      for (std::size_t k = 0; k < nbins; ++k) d.intensity[k] = acc[k] / d.total;
    return d;
  }
};

double degrees(double dy, double dx) { return std::atan2(dy, dx) * 180.0 / std::numbers::pi; }

}  // namespace

AngularDistribution angular_distribution(const WaveField& psi, const AngularSpec& spec) {
  Binner b(spec.bin_width_deg);
  const Grid2D& g = psi.grid();
  const auto v = psi.values();
  for (std::size_t i = 0; i < g.nx(); ++i) {
    const double dx = g.x(i) - spec.origin[0];
    if (!(dx > spec.x_threshold)) continue;
    for (std::size_t j = 0; j < g.ny(); ++j)
      b.add(degrees(g.y(j) - spec.origin[1], dx), std::norm(v[g.index(i, j)]) * g.cell_area());
  }
  return b.finish();
}

AngularDistribution angular_distribution(const TrajectoryEnsemble& e, const AngularSpec& spec) {
  Binner b(spec.bin_width_deg);
  if (e.frames() == 0) return b.finish();
  const std::size_t last = e.frames() - 1;
  for (std::size_t k = 0; k < e.n; ++k) {
    if (!e.usable(k)) continue;
    const auto& p = e.at(last, k);
    const double dx = p[0] - spec.origin[0];
    if (dx > spec.x_threshold) b.add(degrees(p[1] - spec.origin[1], dx), 1.0);
  }
  return b.finish();
}

void write_angular_csv(const std::filesystem::path& path, const AngularDistribution& d) {
  auto out = io::open_output(path);
  out << std::setprecision(12) << "theta_deg,intensity\n";
  for (std::size_t k = 0; k < d.theta_deg.size(); ++k)
    out << d.theta_deg[k] << ',' << d.intensity[k] << '\n';
}

FringeFit fit_fringes(const AngularDistribution& d, double min_relative) {
  const auto& I = d.intensity;
  const std::size_t n = I.size();
  if (n < 3 || d.empty) throw SimulationError("angular distribution is empty");
  const double peak = *std::max_element(I.begin(), I.end());
  std::vector<double> theta;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (!(I[k] >= I[k - 1] && I[k] > I[k + 1]) || I[k] < min_relative * peak) continue;
    const double den = I[k - 1] - 2.0 * I[k] + I[k + 1];
    const double off = den != 0.0 ? 0.5 * (I[k - 1] - I[k + 1]) / den : 0.0;
    theta.push_back(d.theta_deg[k] + off * d.bin_width_deg);
  }
  if (theta.size() < 2) throw SimulationError("fewer than two fringe maxima found");
  FringeFit fit;
  for (double t : theta) fit.sin_theta.push_back(std::sin(t * std::numbers::pi / 180.0));
  std::size_t zero = 0;
  for (std::size_t k = 1; k < fit.sin_theta.size(); ++k)
    if (std::abs(fit.sin_theta[k]) < std::abs(fit.sin_theta[zero])) zero = k;
  double so = 0, ss = 0, soo = 0, sos = 0;
  for (std::size_t k = 0; k < fit.sin_theta.size(); ++k) {
    const int o = static_cast<int>(k) - static_cast<int>(zero);
    fit.order.push_back(o);
    so += o;
    ss += fit.sin_theta[k];
    soo += static_cast<double>(o) * o;
    sos += o * fit.sin_theta[k];
  }
  const double m = static_cast<double>(fit.sin_theta.size());
  fit.spacing = (m * sos - so * ss) / (m * soo - so * so);
  return fit;
}

}  // namespace bohmflow

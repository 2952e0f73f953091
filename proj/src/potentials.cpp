#include "bohmflow/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

#include "bohmflow/field_io.hpp"

namespace bohmflow {

namespace {

struct MbTerm {
  double A, a, b, c, x0, y0;
};

constexpr std::array<MbTerm, 4> kMb{{
    {-200.0, -1.0, 0.0, -10.0, 1.0, 0.0},
    {-100.0, -1.0, 0.0, -10.0, 0.0, 0.5},
    {-170.0, -6.5, 11.0, -6.5, -0.5, 1.5},
    {15.0, 0.7, 0.6, 0.7, -1.0, 1.0},
}};

double param(const std::map<std::string, double>& p, const char* key) { return p.at(key); }

double poly(const std::vector<double>& c, double x, int deriv) {
  double acc = 0.0;
  for (std::size_t n = c.size(); n-- > static_cast<std::size_t>(deriv);) {
    double coef = c[n];
    for (int d = 0; d < deriv; ++d) coef *= static_cast<double>(n - static_cast<std::size_t>(d));
    acc = acc * x + coef;
  }
  return acc;
}

void require_finite(const std::map<std::string, double>& p) {
  for (const auto& [k, v] : p)
    if (!std::isfinite(v)) throw ValidationError("potential." + k, "must be finite");
}

}  // namespace

std::string_view surface_kind_name(SurfaceKind kind) noexcept {
  switch (kind) {
    case SurfaceKind::mueller_brown: return "mueller_brown";
    case SurfaceKind::double_slit: return "double_slit";
    case SurfaceKind::harmonic2d: return "harmonic2d";
    case SurfaceKind::free: return "free";
    case SurfaceKind::separable_custom: return "separable_custom";
  }
  return "free";
}

SurfaceKind parse_surface_kind(std::string_view name) {
  for (auto k : {SurfaceKind::mueller_brown, SurfaceKind::double_slit, SurfaceKind::harmonic2d,
                 SurfaceKind::free, SurfaceKind::separable_custom})
    if (surface_kind_name(k) == name) return k;
  throw ValidationError("potential.kind", "unknown kind '" + std::string(name) + "'");
}

PotentialSurface::PotentialSurface(SurfaceKind kind, std::map<std::string, double> params)
    : kind_(kind), params_(std::move(params)) {
  require_finite(params_);
}

PotentialSurface PotentialSurface::mueller_brown(double energy_scale) {
  return PotentialSurface(SurfaceKind::mueller_brown, {{"energy_scale", energy_scale}});
}

PotentialSurface PotentialSurface::double_slit(double v0, double omega, double alpha, double mass) {
  if (!(v0 > 0)) throw ValidationError("potential.v0", "must be positive");
  if (!(omega > 0)) throw ValidationError("potential.omega", "must be positive");
  if (!(alpha > 0)) throw ValidationError("potential.alpha", "must be positive");
  if (!(mass > 0)) throw ValidationError("potential.mass", "must be positive");
  return PotentialSurface(SurfaceKind::double_slit,
                          {{"v0", v0}, {"omega", omega}, {"alpha", alpha}, {"mass", mass}});
}

PotentialSurface PotentialSurface::harmonic2d(double kx, double ky, double x0, double y0,
                                              double coupling) {
  return PotentialSurface(
      SurfaceKind::harmonic2d,
      {{"kx", kx}, {"ky", ky}, {"x0", x0}, {"y0", y0}, {"coupling", coupling}});
}

PotentialSurface PotentialSurface::free() { return PotentialSurface(SurfaceKind::free, {}); }

PotentialSurface PotentialSurface::separable(std::vector<double> cx, std::vector<double> cy) {
  std::map<std::string, double> p;
  for (std::size_t n = 0; n < cx.size(); ++n) p["cx" + std::to_string(n)] = cx[n];
  for (std::size_t n = 0; n < cy.size(); ++n) p["cy" + std::to_string(n)] = cy[n];
  PotentialSurface s(SurfaceKind::separable_custom, std::move(p));
  s.cx_ = std::move(cx);
  s.cy_ = std::move(cy);
  return s;
}

PotentialSurface PotentialSurface::from_parameters(std::string_view kind_name,
                                                   const std::map<std::string, double>& params) {
  const SurfaceKind kind = parse_surface_kind(kind_name);
  auto take = [&](std::map<std::string, double> defaults) {
    for (const auto& [k, v] : params) {
      if (!defaults.count(k))
        throw ValidationError("potential." + k,
                              "not a parameter of " + std::string(surface_kind_name(kind)));
      defaults[k] = v;
    }
    return defaults;
  };
  switch (kind) {
    case SurfaceKind::mueller_brown: {
      auto p = take({{"energy_scale", 1.0}});
      return mueller_brown(p["energy_scale"]);
    }
    case SurfaceKind::double_slit: {
      auto p = take({{"v0", 8000.0}, {"omega", 600.0}, {"alpha", 25.0}, {"mass", 1.0}});
      return double_slit(p["v0"], p["omega"], p["alpha"], p["mass"]);
    }
    case SurfaceKind::harmonic2d: {
      auto p = take({{"kx", 1.0}, {"ky", 1.0}, {"x0", 0.0}, {"y0", 0.0}, {"coupling", 0.0}});
      return harmonic2d(p["kx"], p["ky"], p["x0"], p["y0"], p["coupling"]);
    }
    case SurfaceKind::free:
      take({});
      return free();
    case SurfaceKind::separable_custom: {
      std::vector<double> cx, cy;
      for (const auto& [k, v] : params) {
        std::size_t pos = 0;
        unsigned long n = 0;
        const bool ok = k.size() > 2 && (k[1] == 'x' || k[1] == 'y') && k[0] == 'c' &&
                        std::all_of(k.begin() + 2, k.end(), [](char ch) { return ch >= '0' && ch <= '9'; });
        if (ok) n = std::stoul(k.substr(2), &pos);
        if (!ok || n > 16) throw ValidationError("potential." + k, "expected cxN or cyN with N <= 16");
        auto& c = k[1] == 'x' ? cx : cy;
        if (c.size() <= n) c.resize(n + 1, 0.0);
        c[n] = v;
      }
      return separable(std::move(cx), std::move(cy));
    }
  }
  throw ValidationError("potential.kind", "unknown kind");
}

double PotentialSurface::value(double x, double y) const {
  switch (kind_) {
    case SurfaceKind::mueller_brown: {
      double v = 0.0;
      for (const auto& t : kMb) {
        const double u = x - t.x0, w = y - t.y0;
        v += t.A * std::exp(t.a * u * u + t.b * u * w + t.c * w * w);
      }
      return param(params_, "energy_scale") * v;
    }
    case SurfaceKind::double_slit: {
      const double v0 = param(params_, "v0"), om = param(params_, "omega");
      const double al = param(params_, "alpha"), m = param(params_, "mass");
      const double y2 = y * y;
      const double f = v0 - 0.5 * m * om * om * y2 + m * m * om * om * om * om * y2 * y2 / (16.0 * v0);
      return f * std::exp(-x * x / (al * al));
    }
    case SurfaceKind::harmonic2d: {
      const double u = x - param(params_, "x0"), w = y - param(params_, "y0");
      return 0.5 * param(params_, "kx") * u * u + 0.5 * param(params_, "ky") * w * w +
             param(params_, "coupling") * u * w;
    }
    case SurfaceKind::free: return 0.0;
    case SurfaceKind::separable_custom: return poly(cx_, x, 0) + poly(cy_, y, 0);
  }
  return 0.0;
}

Vec2 PotentialSurface::gradient(double x, double y) const {
  switch (kind_) {
    case SurfaceKind::mueller_brown: {
      double gx = 0.0, gy = 0.0;
      for (const auto& t : kMb) {
        const double u = x - t.x0, w = y - t.y0;
        const double e = t.A * std::exp(t.a * u * u + t.b * u * w + t.c * w * w);
        gx += e * (2.0 * t.a * u + t.b * w);
        gy += e * (t.b * u + 2.0 * t.c * w);
      }
      const double s = param(params_, "energy_scale");
      return {s * gx, s * gy};
    }
    case SurfaceKind::double_slit: {
      const double v0 = param(params_, "v0"), om = param(params_, "omega");
      const double al = param(params_, "alpha"), m = param(params_, "mass");
      const double a = 0.5 * m * om * om, b = m * m * om * om * om * om / (16.0 * v0);
      const double y2 = y * y;
      const double f = v0 - a * y2 + b * y2 * y2, fy = -2.0 * a * y + 4.0 * b * y2 * y;
      const double g = std::exp(-x * x / (al * al)), gx = -2.0 * x / (al * al) * g;
      return {f * gx, fy * g};
    }
    case SurfaceKind::harmonic2d: {
      const double u = x - param(params_, "x0"), w = y - param(params_, "y0");
      const double k = param(params_, "coupling");
      return {param(params_, "kx") * u + k * w, param(params_, "ky") * w + k * u};
    }
    case SurfaceKind::free: return {0.0, 0.0};
    case SurfaceKind::separable_custom: return {poly(cx_, x, 1), poly(cy_, y, 1)};
  }
  return {0.0, 0.0};
}

Hessian PotentialSurface::hessian(double x, double y) const {
  switch (kind_) {
    case SurfaceKind::mueller_brown: {
      double hxx = 0.0, hxy = 0.0, hyy = 0.0;
      for (const auto& t : kMb) {
        const double u = x - t.x0, w = y - t.y0;
        const double e = t.A * std::exp(t.a * u * u + t.b * u * w + t.c * w * w);
        const double ex = 2.0 * t.a * u + t.b * w, ey = t.b * u + 2.0 * t.c * w;
        hxx += e * (ex * ex + 2.0 * t.a);
        hxy += e * (ex * ey + t.b);
        hyy += e * (ey * ey + 2.0 * t.c);
      }
      const double s = param(params_, "energy_scale");
      return {s * hxx, s * hxy, s * hyy};
    }
    case SurfaceKind::double_slit: {
      const double v0 = param(params_, "v0"), om = param(params_, "omega");
      const double al = param(params_, "alpha"), m = param(params_, "mass");
      const double a = 0.5 * m * om * om, b = m * m * om * om * om * om / (16.0 * v0);
      const double y2 = y * y, al2 = al * al;
      const double f = v0 - a * y2 + b * y2 * y2, fy = -2.0 * a * y + 4.0 * b * y2 * y;
      const double fyy = -2.0 * a + 12.0 * b * y2;
      const double g = std::exp(-x * x / al2), gx = -2.0 * x / al2 * g;
      const double gxx = (4.0 * x * x / (al2 * al2) - 2.0 / al2) * g;
      return {f * gxx, fy * gx, fyy * g};
    }
    case SurfaceKind::harmonic2d:
      return {param(params_, "kx"), param(params_, "coupling"), param(params_, "ky")};
    case SurfaceKind::free: return {0.0, 0.0, 0.0};
    case SurfaceKind::separable_custom: return {poly(cx_, x, 2), 0.0, poly(cy_, y, 2)};
  }
  return {0.0, 0.0, 0.0};
}

std::vector<double> PotentialSurface::sample(const Grid2D& grid) const {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.nx(); ++i)
    for (std::size_t j = 0; j < grid.ny(); ++j) v[grid.index(i, j)] = value(grid.x(i), grid.y(j));
  return v;
}

VectorField PotentialSurface::sample_gradient(const Grid2D& grid) const {
  VectorField g{std::vector<double>(grid.size()), std::vector<double>(grid.size())};
  for (std::size_t i = 0; i < grid.nx(); ++i)
    for (std::size_t j = 0; j < grid.ny(); ++j) {
      const auto d = gradient(grid.x(i), grid.y(j));
      g.x[grid.index(i, j)] = d[0];
      g.y[grid.index(i, j)] = d[1];
    }
  return g;
}

namespace {

StationaryPoint classify(const PotentialSurface& v, double x, double y) {
  StationaryPoint p;
  p.x = x;
  p.y = y;
  p.energy = v.value(x, y);
  const auto g = v.gradient(x, y);
  p.gradient_norm = std::hypot(g[0], g[1]);
  const auto h = v.hessian(x, y);
  const double mean = 0.5 * (h[0] + h[2]);
  const double rad = std::hypot(0.5 * (h[0] - h[2]), h[1]);
  p.lambda_min = mean - rad;
  p.lambda_max = mean + rad;
  // eigenvector of lambda_min; pick the better conditioned of two forms
  Vec2 a{h[1], p.lambda_min - h[0]}, b{p.lambda_min - h[2], h[1]};
  Vec2 e = std::hypot(a[0], a[1]) >= std::hypot(b[0], b[1]) ? a : b;
  double n = std::hypot(e[0], e[1]);
  if (n == 0.0) {
    e = h[0] <= h[2] ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
    n = 1.0;
  }
  p.soft_mode = {e[0] / n, e[1] / n};
  p.index = (p.lambda_min < 0.0) + (p.lambda_max < 0.0);
  return p;
}

}  // namespace

StationaryPoint find_stationary_point(const PotentialSurface& v, double x, double y, double tol,
                                      int max_iter) {
  for (int it = 0; it < max_iter; ++it) {
    const auto g = v.gradient(x, y);
    if (std::hypot(g[0], g[1]) < tol) return classify(v, x, y);
    const auto h = v.hessian(x, y);
    const double det = h[0] * h[2] - h[1] * h[1];
    if (det == 0.0 || !std::isfinite(det))
      throw SimulationError("stationary-point search hit a singular Hessian");
    double sx = (h[2] * g[0] - h[1] * g[1]) / det;
    double sy = (-h[1] * g[0] + h[0] * g[1]) / det;
    // damp very long Newton steps
    const double len = std::hypot(sx, sy);
    if (len > 0.1) {
      sx *= 0.1 / len;
      sy *= 0.1 / len;
    }
    x -= sx;
    y -= sy;
  }
  const auto g = v.gradient(x, y);
  if (std::hypot(g[0], g[1]) < tol) return classify(v, x, y);
  throw SimulationError("stationary-point search did not converge");
}

MuellerBrownPoints mueller_brown_points(double energy_scale) {
  const auto v = PotentialSurface::mueller_brown(energy_scale);
  const double tol = 1e-10 * std::max(1.0, std::abs(energy_scale));
  return {find_stationary_point(v, 0.62, 0.03, tol), find_stationary_point(v, -0.05, 0.47, tol),
          find_stationary_point(v, -0.56, 1.44, tol), find_stationary_point(v, -0.82, 0.62, tol),
          find_stationary_point(v, 0.21, 0.29, tol)};
}

namespace {

std::string mb_label(const PotentialSurface& v, Vec2 p) {
  const auto pts = mueller_brown_points(v.parameters().at("energy_scale"));
  const std::pair<const char*, const StationaryPoint*> named[] = {
      {"M1", &pts.m1}, {"M2", &pts.m2}, {"M3", &pts.m3}, {"TS1", &pts.ts1}, {"TS2", &pts.ts2}};
  for (const auto& [name, s] : named)
    if (std::hypot(p[0] - s->x, p[1] - s->y) < 1e-3) return name;
  return "";
}

std::vector<Vec2> descend(const PotentialSurface& v, const StationaryPoint& saddle, double sign,
                          const DescentOptions& opt) {
  std::vector<Vec2> pts;
  Vec2 p{saddle.x + sign * opt.step * saddle.soft_mode[0],
         saddle.y + sign * opt.step * saddle.soft_mode[1]};
  double e = v.value(p[0], p[1]);
  pts.push_back(p);
  for (std::size_t k = 0; k < opt.max_steps; ++k) {
    const auto g = v.gradient(p[0], p[1]);
    const double gn = std::hypot(g[0], g[1]);
    if (gn < opt.gradient_tol) return pts;
    const Vec2 q{p[0] - opt.step * g[0] / gn, p[1] - opt.step * g[1] / gn};
    const double eq = v.value(q[0], q[1]);
    if (!(eq < e)) {
      // within one step of the minimum: polish and finish
      const auto m = find_stationary_point(v, p[0], p[1], opt.gradient_tol * 1e-2);
      if (m.index != 0) throw SimulationError("descent branch ended on a non-minimum");
      if (std::hypot(m.x - p[0], m.y - p[1]) > 0.0) pts.push_back({m.x, m.y});
      return pts;
    }
    p = q;
    e = eq;
    pts.push_back(p);
  }
  throw SimulationError("steepest descent did not reach a minimum within max_steps");
}

}  // namespace

ReactionPath steepest_descent_path(const PotentialSurface& v, Vec2 start,
                                   const DescentOptions& opt) {
  if (!(opt.step > 0)) throw ValidationError("step", "must be positive");
  StationaryPoint s;
  try {
    s = find_stationary_point(v, start[0], start[1], 1e-10);
  } catch (const SimulationError&) {
    throw ValidationError("start", "not a saddle (no stationary point nearby)");
  }
  if (s.index != 1) throw ValidationError("start", "not a saddle");
  if (std::hypot(s.x - start[0], s.y - start[1]) > 0.1)
    throw ValidationError("start", "not a saddle (nearest stationary point is far away)");

  auto minus = descend(v, s, -1.0, opt);
  const auto plus = descend(v, s, +1.0, opt);
  ReactionPath rp;
  rp.points.assign(minus.rbegin(), minus.rend());
  rp.saddle_index = rp.points.size();
  rp.points.push_back({s.x, s.y});
  rp.points.insert(rp.points.end(), plus.begin(), plus.end());
  rp.arc_length = arc_length(rp.points);
  rp.energy.reserve(rp.points.size());
  for (const auto& p : rp.points) rp.energy.push_back(v.value(p[0], p[1]));
  if (v.kind() == SurfaceKind::mueller_brown) {
    rp.start_label = mb_label(v, rp.points.front());
    rp.saddle_label = mb_label(v, rp.points[rp.saddle_index]);
    rp.end_label = mb_label(v, rp.points.back());
  }
  if (rp.start_label.empty()) rp.start_label = "min-";
  if (rp.saddle_label.empty()) rp.saddle_label = "saddle";
  if (rp.end_label.empty()) rp.end_label = "min+";
  return rp;
}

std::vector<double> arc_length(const std::vector<Vec2>& points) {
  if (points.size() < 2) throw ValidationError("path", "needs at least two points");
  std::vector<double> s(points.size(), 0.0);
  for (std::size_t i = 1; i < points.size(); ++i)
    s[i] = s[i - 1] + std::hypot(points[i][0] - points[i - 1][0], points[i][1] - points[i - 1][1]);
  return s;
}

void write_reaction_path_csv(const std::filesystem::path& path, const ReactionPath& rp) {
  auto out = io::open_output(path);
  out << std::setprecision(17) << "x,y,s,V\n";
  for (std::size_t i = 0; i < rp.points.size(); ++i)
    out << rp.points[i][0] << ',' << rp.points[i][1] << ',' << rp.arc_length[i] << ','
        << rp.energy[i] << '\n';
}

}  // namespace bohmflow

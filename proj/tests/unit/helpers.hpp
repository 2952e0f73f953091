#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "bohmflow/grid.hpp"
#include "bohmflow/wavefield.hpp"

namespace testing {

using bohmflow::cplx;

inline std::vector<cplx> random_complex(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<cplx> v(n);
  for (auto& z : v) z = {d(rng), d(rng)};
  return v;
}

inline std::vector<double> random_real(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(0.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

/// psi(x, y) = f(x, y) on every node.
template <class F>
bohmflow::WaveField sampled(const bohmflow::Grid2D& g, double mass, F&& f) {
  std::vector<cplx> v(g.size());
  for (std::size_t i = 0; i < g.nx(); ++i)
    for (std::size_t j = 0; j < g.ny(); ++j) v[g.index(i, j)] = f(g.x(i), g.y(j));
  return bohmflow::WaveField(g, std::move(v), mass);
}

template <class F>
bohmflow::WaveField1D sampled1d(const bohmflow::Grid1D& g, double mass, F&& f) {
  std::vector<cplx> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = f(g.x(i));
  return bohmflow::WaveField1D(g, std::move(v), mass);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace testing

#include "bohmflow/grid.hpp"

#include <cmath>

namespace bohmflow {

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

namespace {

void check_axis(const char* name, std::size_t n, double lo, double hi) {
  if (n < 8 || !is_power_of_two(n))
    throw ValidationError(std::string("grid.") + name, "point count must be a power of two >= 8");
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo))
    throw ValidationError(std::string("grid.") + name, "bounds must be finite with max > min");
}

}  // namespace

Grid2D::Grid2D(std::size_t nx, std::size_t ny, double x_min, double x_max, double y_min,
               double y_max)
    : nx_(nx), ny_(ny), x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max) {
  check_axis("nx", nx, x_min, x_max);
  check_axis("ny", ny, y_min, y_max);
  dx_ = (x_max - x_min) / static_cast<double>(nx);
  dy_ = (y_max - y_min) / static_cast<double>(ny);
}

Grid1D::Grid1D(std::size_t n, double x_min, double x_max) : n_(n), x_min_(x_min), x_max_(x_max) {
  check_axis("n", n, x_min, x_max);
  dx_ = (x_max - x_min) / static_cast<double>(n);
}

Grid1D x_axis(const Grid2D& g) { return Grid1D(g.nx(), g.x_min(), g.x_max()); }
Grid1D y_axis(const Grid2D& g) { return Grid1D(g.ny(), g.y_min(), g.y_max()); }

}  // namespace bohmflow

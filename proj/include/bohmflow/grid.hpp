#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bohmflow {

/// Thrown when user-supplied parameters violate a documented invariant.
/// `field()` names the offending parameter (dotted path for scenario keys).
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Numerical failure during a run (NaN, non-convergence).
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool is_power_of_two(std::size_t n) noexcept;

/// Uniform periodic grid on [x_min, x_max) x [y_min, y_max); the upper bound is
/// excluded, so dx = (x_max - x_min) / nx. Node (i, j) sits at
/// (x_min + i dx, y_min + j dy). Storage order everywhere is row-major with x
/// as the slow index: flat index = i * ny + j.
class Grid2D {
 public:
  Grid2D() = default;
  Grid2D(std::size_t nx, std::size_t ny, double x_min, double x_max, double y_min,
         double y_max);

  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  std::size_t size() const noexcept { return nx_ * ny_; }
  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  double y_min() const noexcept { return y_min_; }
  double y_max() const noexcept { return y_max_; }
  double dx() const noexcept { return dx_; }
  double dy() const noexcept { return dy_; }
  double cell_area() const noexcept { return dx_ * dy_; }

  double x(std::size_t i) const noexcept { return x_min_ + static_cast<double>(i) * dx_; }
  double y(std::size_t j) const noexcept { return y_min_ + static_cast<double>(j) * dy_; }
  std::size_t index(std::size_t i, std::size_t j) const noexcept { return i * ny_ + j; }

  bool contains(double x, double y) const noexcept {
    return x >= x_min_ && x < x_max_ && y >= y_min_ && y < y_max_;
  }

  friend bool operator==(const Grid2D& a, const Grid2D& b) noexcept {
    return a.nx_ == b.nx_ && a.ny_ == b.ny_ && a.x_min_ == b.x_min_ && a.x_max_ == b.x_max_ &&
           a.y_min_ == b.y_min_ && a.y_max_ == b.y_max_;
  }

 private:
  std::size_t nx_ = 0, ny_ = 0;
  double x_min_ = 0, x_max_ = 0, y_min_ = 0, y_max_ = 0;
  double dx_ = 0, dy_ = 0;
};

/// One-dimensional counterpart used by the reduced and mixed quantum-classical
/// modules. Same periodic convention.
class Grid1D {
 public:
  Grid1D() = default;
  Grid1D(std::size_t n, double x_min, double x_max);

  std::size_t size() const noexcept { return n_; }
  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  double dx() const noexcept { return dx_; }
  double x(std::size_t i) const noexcept { return x_min_ + static_cast<double>(i) * dx_; }

  friend bool operator==(const Grid1D& a, const Grid1D& b) noexcept {
    return a.n_ == b.n_ && a.x_min_ == b.x_min_ && a.x_max_ == b.x_max_;
  }

 private:
  std::size_t n_ = 0;
  double x_min_ = 0, x_max_ = 0, dx_ = 0;
};

Grid1D x_axis(const Grid2D& g);
Grid1D y_axis(const Grid2D& g);

}  // namespace bohmflow

#pragma once

// FFT-backed spectral differentiation on the periodic grids. FFTW plans are
// created with FFTW_ESTIMATE so that results are bit-reproducible run to run.

#include <memory>
#include <span>
#include <vector>

#include "bohmflow/grid.hpp"
#include "bohmflow/wavefield.hpp"

namespace bohmflow::spectral {

/// Angular wave numbers of an n-point periodic axis of length L, in FFT order.
std::vector<double> wavenumbers(std::size_t n, double length);

class Fft2D {
 public:
  explicit Fft2D(const Grid2D& grid);
  ~Fft2D();
  Fft2D(Fft2D&&) noexcept;
  Fft2D& operator=(Fft2D&&) noexcept;
  Fft2D(const Fft2D&) = delete;
  Fft2D& operator=(const Fft2D&) = delete;

  const Grid2D& grid() const noexcept { return grid_; }
  const std::vector<double>& kx() const noexcept { return kx_; }
  const std::vector<double>& ky() const noexcept { return ky_; }

  /// In place, unnormalized.
  void forward(std::span<cplx> data) const;
  /// In place, without the 1/N factor.
  void backward(std::span<cplx> data) const;
  /// In place, divided by N (true inverse of forward()).
  void inverse(std::span<cplx> data) const;

 private:
  struct Plans;
  Grid2D grid_;
  std::vector<double> kx_, ky_;
  std::unique_ptr<Plans> plans_;
};

class Fft1D {
 public:
  Fft1D(std::size_t n, double length);
  explicit Fft1D(const Grid1D& grid) : Fft1D(grid.size(), grid.x_max() - grid.x_min()) {}
  ~Fft1D();
  Fft1D(Fft1D&&) noexcept;
  Fft1D& operator=(Fft1D&&) noexcept;
  Fft1D(const Fft1D&) = delete;
  Fft1D& operator=(const Fft1D&) = delete;

  std::size_t size() const noexcept { return k_.size(); }
  const std::vector<double>& k() const noexcept { return k_; }

  void forward(std::span<cplx> data) const;
  void backward(std::span<cplx> data) const;
  void inverse(std::span<cplx> data) const;

 private:
  struct Plans;
  std::vector<double> k_;
  std::unique_ptr<Plans> plans_;
};

struct Gradient2D {
  std::vector<cplx> dx, dy;
};

struct Hessian2D {
  std::vector<cplx> dxx, dyy, dxy;
};

/// Spectral first and (optionally) second derivatives of a periodic field.
/// Odd-order Nyquist modes are zeroed so that derivatives of real fields stay
/// real. Either output may be null.
void derivatives(const Fft2D& fft, std::span<const cplx> f, Gradient2D* grad, Hessian2D* hess);

/// d^order f / dx^order of a periodic 1D field (order 1 or 2).
std::vector<cplx> derivative(const Fft1D& fft, std::span<const cplx> f, int order);

}  // namespace bohmflow::spectral

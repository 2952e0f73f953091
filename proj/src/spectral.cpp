#include "bohmflow/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace bohmflow::spectral {

namespace {

// The FFTW planner is not thread safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::span<cplx> s) { return reinterpret_cast<fftw_complex*>(s.data()); }

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  template <class MakePlan>
  PlanPair(std::size_t n, MakePlan make) {
    std::lock_guard lock(planner_mutex());
    auto* buf = fftw_alloc_complex(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd = make(buf, FFTW_FORWARD, flags);
    bwd = make(buf, FFTW_BACKWARD, flags);
    fftw_free(buf);
  }
  ~PlanPair() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
  PlanPair(const PlanPair&) = delete;
  PlanPair& operator=(const PlanPair&) = delete;
};

void scale(std::span<cplx> data, double s) {
  for (auto& z : data) z *= s;
}

}  // namespace

std::vector<double> wavenumbers(std::size_t n, double length) {
  std::vector<double> k(n);
  const double base = 2.0 * std::numbers::pi / length;
  for (std::size_t i = 0; i < n; ++i) {
    const auto m = static_cast<long long>(i);
    k[i] = base * static_cast<double>(i < n / 2 ? m : m - static_cast<long long>(n));
  }
  return k;
}

struct Fft2D::Plans : PlanPair {
  using PlanPair::PlanPair;
};

Fft2D::Fft2D(const Grid2D& grid)
    : grid_(grid),
      kx_(wavenumbers(grid.nx(), grid.x_max() - grid.x_min())),
      ky_(wavenumbers(grid.ny(), grid.y_max() - grid.y_min())) {
  const int nx = static_cast<int>(grid.nx()), ny = static_cast<int>(grid.ny());
  plans_ = std::make_unique<Plans>(grid.size(), [&](fftw_complex* buf, int sign, unsigned flags) {
    return fftw_plan_dft_2d(nx, ny, buf, buf, sign, flags);
  });
}

Fft2D::~Fft2D() = default;
Fft2D::Fft2D(Fft2D&&) noexcept = default;
Fft2D& Fft2D::operator=(Fft2D&&) noexcept = default;

void Fft2D::forward(std::span<cplx> data) const {
  fftw_execute_dft(plans_->fwd, as_fftw(data), as_fftw(data));
}
void Fft2D::backward(std::span<cplx> data) const {
  fftw_execute_dft(plans_->bwd, as_fftw(data), as_fftw(data));
}
void Fft2D::inverse(std::span<cplx> data) const {
  backward(data);
  scale(data, 1.0 / static_cast<double>(grid_.size()));
}

struct Fft1D::Plans : PlanPair {
  using PlanPair::PlanPair;
};

Fft1D::Fft1D(std::size_t n, double length) : k_(wavenumbers(n, length)) {
  plans_ = std::make_unique<Plans>(n, [&](fftw_complex* buf, int sign, unsigned flags) {
    return fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign, flags);
  });
}

Fft1D::~Fft1D() = default;
Fft1D::Fft1D(Fft1D&&) noexcept = default;
Fft1D& Fft1D::operator=(Fft1D&&) noexcept = default;

void Fft1D::forward(std::span<cplx> data) const {
  fftw_execute_dft(plans_->fwd, as_fftw(data), as_fftw(data));
}
void Fft1D::backward(std::span<cplx> data) const {
  fftw_execute_dft(plans_->bwd, as_fftw(data), as_fftw(data));
}
void Fft1D::inverse(std::span<cplx> data) const {
  backward(data);
  scale(data, 1.0 / static_cast<double>(size()));
}

void derivatives(const Fft2D& fft, std::span<const cplx> f, Gradient2D* grad, Hessian2D* hess) {
  const Grid2D& g = fft.grid();
  const std::size_t nx = g.nx(), ny = g.ny(), n = g.size();
  std::vector<cplx> spec(f.begin(), f.end());
  fft.forward(spec);
  const double inv_n = 1.0 / static_cast<double>(n);
  const auto& kx = fft.kx();
  const auto& ky = fft.ky();
  const std::size_t nyq_x = nx / 2, nyq_y = ny / 2;
  const cplx I(0.0, 1.0);

  auto transform = [&](std::vector<cplx>& out, auto&& multiplier) {
    out.resize(n);
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t j = 0; j < ny; ++j) {
        const std::size_t idx = i * ny + j;
        out[idx] = spec[idx] * multiplier(i, j) * inv_n;
      }
    fft.backward(out);
  };

  if (grad) {
    transform(grad->dx, [&](std::size_t i, std::size_t) { return i == nyq_x ? cplx{} : I * kx[i]; });
    transform(grad->dy, [&](std::size_t, std::size_t j) { return j == nyq_y ? cplx{} : I * ky[j]; });
  }
  if (hess) {
    transform(hess->dxx, [&](std::size_t i, std::size_t) { return cplx(-kx[i] * kx[i]); });
    transform(hess->dyy, [&](std::size_t, std::size_t j) { return cplx(-ky[j] * ky[j]); });
    transform(hess->dxy, [&](std::size_t i, std::size_t j) {
      return (i == nyq_x || j == nyq_y) ? cplx{} : cplx(-kx[i] * ky[j]);
    });
  }
}

std::vector<cplx> derivative(const Fft1D& fft, std::span<const cplx> f, int order) {
  if (order != 1 && order != 2) throw std::invalid_argument("derivative order must be 1 or 2");
  std::vector<cplx> out(f.begin(), f.end());
  fft.forward(out);
  const auto& k = fft.k();
  const std::size_t n = k.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (order == 1)
      out[i] *= (i == n / 2) ? cplx{} : cplx(0.0, k[i]);
    else
      out[i] *= -k[i] * k[i];
  }
  fft.inverse(out);
  return out;
}

}  // namespace bohmflow::spectral

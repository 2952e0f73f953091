#include "bohmflow/kernels.hpp"

#include <cassert>

namespace bohmflow::kernels::scalar {

// Written on the (re, im) pairs rather than through std::complex operator* so
// that the arithmetic matches the vector variants term for term (no Annex G
// inf/nan recovery path).

void multiply(std::span<cplx> psi, std::span<const cplx> factor) {
  assert(psi.size() == factor.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double a = psi[i].real(), b = psi[i].imag();
    const double c = factor[i].real(), d = factor[i].imag();
    psi[i] = cplx(a * c - b * d, a * d + b * c);
  }
}

void scale_real(std::span<cplx> psi, std::span<const double> weight) {
  assert(psi.size() == weight.size());
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] *= weight[i];
}

void abs_squared(std::span<const cplx> psi, std::span<double> out) {
  assert(psi.size() == out.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double a = psi[i].real(), b = psi[i].imag();
    out[i] = a * a + b * b;
  }
}

double sum_abs_squared(std::span<const cplx> psi) {
  double s = 0.0;
  for (const auto& z : psi) s += z.real() * z.real() + z.imag() * z.imag();
  return s;
}

void current(std::span<const cplx> psi, std::span<const cplx> dpsi, double scale,
             std::span<double> out) {
  assert(psi.size() == dpsi.size() && psi.size() == out.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    // Im(conj(a) * b) = a.re * b.im - a.im * b.re
    out[i] = scale * (psi[i].real() * dpsi[i].imag() - psi[i].imag() * dpsi[i].real());
  }
}

double weighted_abs_squared(std::span<const cplx> psi, std::span<const double> w) {
  assert(psi.size() == w.size());
  double s = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i)
    s += w[i] * (psi[i].real() * psi[i].real() + psi[i].imag() * psi[i].imag());
  return s;
}

}  // namespace bohmflow::kernels::scalar

#pragma once

// Elementwise complex kernels used by the propagator and the hydrodynamic
// field code. Each kernel has a scalar reference implementation and, on
// x86-64, an AVX2+FMA variant; the variant is chosen once at startup from
// CPUID and can be pinned with BOHMFLOW_ISA=scalar|avx2 or force_isa().

#include <complex>
#include <span>
#include <string_view>

namespace bohmflow::kernels {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa) noexcept;

/// Best variant this CPU and build support.
Isa detected_isa() noexcept;
/// Variant currently used by the dispatching entry points.
Isa active_isa() noexcept;
/// Pin the dispatch target. Throws std::invalid_argument if unsupported here.
void force_isa(Isa isa);

/// The dispatching entry points throw std::invalid_argument when span
/// lengths differ.

/// psi[i] *= factor[i]
void multiply(std::span<cplx> psi, std::span<const cplx> factor);
/// psi[i] *= weight[i] (real weights, e.g. an absorbing mask)
void scale_real(std::span<cplx> psi, std::span<const double> weight);
/// out[i] = |psi[i]|^2
void abs_squared(std::span<const cplx> psi, std::span<double> out);
/// sum_i |psi[i]|^2
double sum_abs_squared(std::span<const cplx> psi);
/// out[i] = scale * Im(conj(psi[i]) * dpsi[i]); the probability current for
/// scale = hbar / m.
void current(std::span<const cplx> psi, std::span<const cplx> dpsi, double scale,
             std::span<double> out);
/// sum_i w[i] * |psi[i]|^2
double weighted_abs_squared(std::span<const cplx> psi, std::span<const double> w);

namespace scalar {
void multiply(std::span<cplx> psi, std::span<const cplx> factor);
void scale_real(std::span<cplx> psi, std::span<const double> weight);
void abs_squared(std::span<const cplx> psi, std::span<double> out);
double sum_abs_squared(std::span<const cplx> psi);
void current(std::span<const cplx> psi, std::span<const cplx> dpsi, double scale,
             std::span<double> out);
double weighted_abs_squared(std::span<const cplx> psi, std::span<const double> w);
}  // namespace scalar

#if defined(BOHMFLOW_HAVE_AVX2) || defined(BOHMFLOW_DECLARE_AVX2)
namespace avx2 {
void multiply(std::span<cplx> psi, std::span<const cplx> factor);
void scale_real(std::span<cplx> psi, std::span<const double> weight);
void abs_squared(std::span<const cplx> psi, std::span<double> out);
double sum_abs_squared(std::span<const cplx> psi);
void current(std::span<const cplx> psi, std::span<const cplx> dpsi, double scale,
             std::span<double> out);
double weighted_abs_squared(std::span<const cplx> psi, std::span<const double> w);
}  // namespace avx2
#endif

}  // namespace bohmflow::kernels

// AVX2 + FMA variants. This translation unit is the only one compiled with
// -mavx2 -mfma; nothing here may be called unless CPUID reports both.

#include <immintrin.h>

#include <cassert>

#include "bohmflow/kernels.hpp"

namespace bohmflow::kernels::avx2 {

namespace {

inline const double* raw(std::span<const cplx> s) {
  return reinterpret_cast<const double*>(s.data());
}
inline double* raw(std::span<cplx> s) { return reinterpret_cast<double*>(s.data()); }

// |z|^2 for four consecutive complex values, in order.
inline __m256d abs2_x4(const double* p) {
  const __m256d a = _mm256_loadu_pd(p);      // z0, z1
  const __m256d b = _mm256_loadu_pd(p + 4);  // z2, z3
  const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
  return _mm256_permute4x64_pd(h, 0xD8);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void multiply(std::span<cplx> psi, std::span<const cplx> factor) {
  assert(psi.size() == factor.size());
  double* p = raw(psi);
  const double* f = raw(factor);
  const std::size_t n = psi.size();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d z = _mm256_loadu_pd(p + 2 * i);
    const __m256d w = _mm256_loadu_pd(f + 2 * i);
    const __m256d wr = _mm256_movedup_pd(w);
    const __m256d wi = _mm256_permute_pd(w, 0xF);
    const __m256d zs = _mm256_permute_pd(z, 0x5);
    _mm256_storeu_pd(p + 2 * i, _mm256_fmaddsub_pd(z, wr, _mm256_mul_pd(zs, wi)));
  }
  if (i < n) scalar::multiply(psi.subspan(i), factor.subspan(i));
}

void scale_real(std::span<cplx> psi, std::span<const double> weight) {
  assert(psi.size() == weight.size());
  double* p = raw(psi);
  const double* w = weight.data();
  const std::size_t n = psi.size();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d ww = _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(w + i)), 0x50);
    _mm256_storeu_pd(p + 2 * i, _mm256_mul_pd(_mm256_loadu_pd(p + 2 * i), ww));
  }
  if (i < n) scalar::scale_real(psi.subspan(i), weight.subspan(i));
}

void abs_squared(std::span<const cplx> psi, std::span<double> out) {
  assert(psi.size() == out.size());
  const double* p = raw(psi);
  const std::size_t n = psi.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out.data() + i, abs2_x4(p + 2 * i));
  if (i < n) scalar::abs_squared(psi.subspan(i), out.subspan(i));
}

double sum_abs_squared(std::span<const cplx> psi) {
  const double* p = raw(psi);
  const std::size_t n = psi.size();
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(p + 2 * i);
    const __m256d b = _mm256_loadu_pd(p + 2 * i + 4);
    acc0 = _mm256_fmadd_pd(a, a, acc0);
    acc1 = _mm256_fmadd_pd(b, b, acc1);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  if (i < n) s += scalar::sum_abs_squared(psi.subspan(i));
  return s;
}

void current(std::span<const cplx> psi, std::span<const cplx> dpsi, double scale,
             std::span<double> out) {
  assert(psi.size() == dpsi.size() && psi.size() == out.size());
  const double* p = raw(psi);
  const double* d = raw(dpsi);
  const std::size_t n = psi.size();
  const __m256d s = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    // (re*dim, im*dre) pairs, then horizontal difference
    const __m256d a = _mm256_mul_pd(_mm256_loadu_pd(p + 2 * i),
                                    _mm256_permute_pd(_mm256_loadu_pd(d + 2 * i), 0x5));
    const __m256d b = _mm256_mul_pd(_mm256_loadu_pd(p + 2 * i + 4),
                                    _mm256_permute_pd(_mm256_loadu_pd(d + 2 * i + 4), 0x5));
    const __m256d h = _mm256_permute4x64_pd(_mm256_hsub_pd(a, b), 0xD8);
    _mm256_storeu_pd(out.data() + i, _mm256_mul_pd(s, h));
  }
  if (i < n) scalar::current(psi.subspan(i), dpsi.subspan(i), scale, out.subspan(i));
}

double weighted_abs_squared(std::span<const cplx> psi, std::span<const double> w) {
  assert(psi.size() == w.size());
  const double* p = raw(psi);
  const std::size_t n = psi.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_fmadd_pd(abs2_x4(p + 2 * i), _mm256_loadu_pd(w.data() + i), acc);
  double s = hsum(acc);
  if (i < n) s += scalar::weighted_abs_squared(psi.subspan(i), w.subspan(i));
  return s;
}

}  // namespace bohmflow::kernels::avx2

#include "bohmflow/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace bohmflow::kernels {

namespace {

struct Table {
  void (*multiply)(std::span<cplx>, std::span<const cplx>);
  void (*scale_real)(std::span<cplx>, std::span<const double>);
  void (*abs_squared)(std::span<const cplx>, std::span<double>);
  double (*sum_abs_squared)(std::span<const cplx>);
  void (*current)(std::span<const cplx>, std::span<const cplx>, double, std::span<double>);
  double (*weighted_abs_squared)(std::span<const cplx>, std::span<const double>);
};

constexpr Table kScalar{scalar::multiply,        scalar::scale_real, scalar::abs_squared,
                        scalar::sum_abs_squared, scalar::current,    scalar::weighted_abs_squared};

#if defined(BOHMFLOW_HAVE_AVX2)
constexpr Table kAvx2{avx2::multiply,        avx2::scale_real, avx2::abs_squared,
                      avx2::sum_abs_squared, avx2::current,    avx2::weighted_abs_squared};
#endif

bool cpu_has_avx2() noexcept {
#if defined(BOHMFLOW_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Table* table_for(Isa isa) noexcept {
#if defined(BOHMFLOW_HAVE_AVX2)
  if (isa == Isa::avx2) return &kAvx2;
#endif
  (void)isa;
  return &kScalar;
}

Isa initial_isa() noexcept {
  Isa isa = detected_isa();
  if (const char* env = std::getenv("BOHMFLOW_ISA")) {
    const std::string v(env);
    if (v == "scalar") isa = Isa::scalar;
  }
  return isa;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

const Table& dispatch() noexcept { return *table_for(active().load(std::memory_order_relaxed)); }

void same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": length mismatch");
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

Isa detected_isa() noexcept {
  static const Isa isa = cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
  return isa;
}

Isa active_isa() noexcept { return active().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (isa == Isa::avx2 && detected_isa() != Isa::avx2)
    throw std::invalid_argument("AVX2 kernels are not available on this CPU/build");
  active().store(isa, std::memory_order_relaxed);
}

void multiply(std::span<cplx> psi, std::span<const cplx> factor) {
  same_length(psi.size(), factor.size(), "multiply");
  dispatch().multiply(psi, factor);
}
void scale_real(std::span<cplx> psi, std::span<const double> weight) {
  same_length(psi.size(), weight.size(), "scale_real");
  dispatch().scale_real(psi, weight);
}
void abs_squared(std::span<const cplx> psi, std::span<double> out) {
  same_length(psi.size(), out.size(), "abs_squared");
  dispatch().abs_squared(psi, out);
}
double sum_abs_squared(std::span<const cplx> psi) { return dispatch().sum_abs_squared(psi); }
void current(std::span<const cplx> psi, std::span<const cplx> dpsi, double scale,
             std::span<double> out) {
  same_length(psi.size(), dpsi.size(), "current");
  same_length(psi.size(), out.size(), "current");
  dispatch().current(psi, dpsi, scale, out);
}
double weighted_abs_squared(std::span<const cplx> psi, std::span<const double> w) {
  same_length(psi.size(), w.size(), "weighted_abs_squared");
  return dispatch().weighted_abs_squared(psi, w);
}

}  // namespace bohmflow::kernels

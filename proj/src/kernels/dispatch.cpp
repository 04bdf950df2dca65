#include <atomic>
#include <cstdlib>
#include <string_view>

#include "gaitid/error.hpp"
#include "gaitid/kernels.hpp"

namespace gaitid::kernels {

#ifndef GAITID_HAVE_AVX2
// Stubs so the symbol set is identical on builds without the AVX2 unit; they
// are never selected because isa_supported(avx2) is false there.
namespace avx2 {
double dot(std::span<const double> a, std::span<const double> b) { return scalar::dot(a, b); }
void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  scalar::axpy(alpha, x, y);
}
void central_diff(std::span<const double> x, double dt, std::span<double> out) {
  scalar::central_diff(x, dt, out);
}
void fourier_basis(std::span<const double> phase, int order, std::span<double> out) {
  scalar::fourier_basis(phase, order, out);
}
}  // namespace avx2
#endif

namespace {

Isa detect() {
  if (const char* env = std::getenv("GAITID_SIMD")) {
    const std::string_view v(env);
    if (v == "scalar") return Isa::scalar;
    if (v == "avx2" && isa_supported(Isa::avx2)) return Isa::avx2;
  }
  return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool isa_supported(Isa isa) {
  if (isa == Isa::scalar) return true;
#if defined(GAITID_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw InvalidArgument(std::string("kernel variant not supported: ") + isa_name(isa));
  }
  current().store(isa, std::memory_order_relaxed);
}

double dot(std::span<const double> a, std::span<const double> b) {
  return active_isa() == Isa::avx2 ? avx2::dot(a, b) : scalar::dot(a, b);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (active_isa() == Isa::avx2) {
    avx2::axpy(alpha, x, y);
  } else {
    scalar::axpy(alpha, x, y);
  }
}

void central_diff(std::span<const double> x, double dt, std::span<double> out) {
  if (active_isa() == Isa::avx2) {
    avx2::central_diff(x, dt, out);
  } else {
    scalar::central_diff(x, dt, out);
  }
}

void fourier_basis(std::span<const double> phase, int order, std::span<double> out) {
  if (active_isa() == Isa::avx2) {
    avx2::fourier_basis(phase, order, out);
  } else {
    scalar::fourier_basis(phase, order, out);
  }
}

void gram(std::span<const double> x, std::size_t rows, std::size_t cols, std::span<double> out) {
  for (std::size_t a = 0; a < cols; ++a) {
    const auto ca = x.subspan(a * rows, rows);
    for (std::size_t b = a; b < cols; ++b) {
      const double v = dot(ca, x.subspan(b * rows, rows));
      out[a * cols + b] = v;
      out[b * cols + a] = v;
    }
  }
}

}  // namespace gaitid::kernels

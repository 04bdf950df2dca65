#pragma once

// Data-parallel inner loops shared by the regression, Fourier and
// differentiation code. Each kernel has a scalar reference implementation and
// an AVX2/FMA variant; the variant is picked once at runtime from CPUID and can
// be pinned with the GAITID_SIMD environment variable ("scalar" or "avx2").

#include <cstddef>
#include <span>

namespace gaitid::kernels {

enum class Isa { scalar, avx2 };

const char* isa_name(Isa isa);

/// True when the running CPU (and this build) can execute the given variant.
bool isa_supported(Isa isa);

/// Variant currently used by the dispatching entry points.
Isa active_isa();

/// Pin the dispatching entry points to a variant (tests, benchmarks).
/// Throws InvalidArgument if the variant is not supported here.
void set_active_isa(Isa isa);

double dot(std::span<const double> a, std::span<const double> b);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// out[i] = (x[i+1] - x[i-1]) / (2 dt) for interior i; endpoints untouched.
void central_diff(std::span<const double> x, double dt, std::span<double> out);

/// Column-major real Fourier design matrix: column 0 is 1, column 2k-1 is
/// cos(k phi), column 2k is sin(k phi), k = 1..order. out has
/// phase.size() * (2 order + 1) entries.
void fourier_basis(std::span<const double> phase, int order, std::span<double> out);

/// Upper triangle (mirrored) of X^T X for a column-major rows x cols matrix.
void gram(std::span<const double> x, std::size_t rows, std::size_t cols, std::span<double> out);

// Direct access to each variant for equivalence testing.
namespace scalar {
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void central_diff(std::span<const double> x, double dt, std::span<double> out);
void fourier_basis(std::span<const double> phase, int order, std::span<double> out);
}  // namespace scalar

namespace avx2 {
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void central_diff(std::span<const double> x, double dt, std::span<double> out);
void fourier_basis(std::span<const double> phase, int order, std::span<double> out);
}  // namespace avx2

}  // namespace gaitid::kernels

#include <immintrin.h>

#include <cmath>

#include "gaitid/kernels.hpp"

namespace gaitid::kernels::avx2 {

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i), acc);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double tail = 0.0;
  for (; i < n; ++i) tail += a[i] * b[i];
  return ((lanes[0] + lanes[2]) + (lanes[1] + lanes[3])) + tail;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y.data() + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x.data() + i), vy);
    _mm256_storeu_pd(y.data() + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void central_diff(std::span<const double> x, double dt, std::span<double> out) {
  const std::size_t n = x.size();
  if (n < 3) return;
  const double inv = 1.0 / (2.0 * dt);
  const __m256d vinv = _mm256_set1_pd(inv);
  std::size_t i = 1;
  for (; i + 4 < n; i += 4) {
    const __m256d hi = _mm256_loadu_pd(x.data() + i + 1);
    const __m256d lo = _mm256_loadu_pd(x.data() + i - 1);
    _mm256_storeu_pd(out.data() + i, _mm256_mul_pd(_mm256_sub_pd(hi, lo), vinv));
  }
  for (; i + 1 < n; ++i) out[i] = (x[i + 1] - x[i - 1]) * inv;
}

void fourier_basis(std::span<const double> phase, int order, std::span<double> out) {
  const std::size_t n = phase.size();
  for (std::size_t i = 0; i < n; ++i) out[i] = 1.0;
  if (order == 0) return;
  double* c1 = out.data() + n;
  double* s1 = out.data() + 2 * n;
  for (std::size_t i = 0; i < n; ++i) {
    c1[i] = std::cos(phase[i]);
    s1[i] = std::sin(phase[i]);
  }
  for (int k = 2; k <= order; ++k) {
    const double* cp = out.data() + (2 * k - 3) * n;
    const double* sp = out.data() + (2 * k - 2) * n;
    double* ck = out.data() + (2 * k - 1) * n;
    double* sk = out.data() + (2 * k) * n;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
      const __m256d vc = _mm256_loadu_pd(cp + i);
      const __m256d vs = _mm256_loadu_pd(sp + i);
      const __m256d vc1 = _mm256_loadu_pd(c1 + i);
      const __m256d vs1 = _mm256_loadu_pd(s1 + i);
      _mm256_storeu_pd(ck + i, _mm256_sub_pd(_mm256_mul_pd(vc, vc1), _mm256_mul_pd(vs, vs1)));
      _mm256_storeu_pd(sk + i, _mm256_add_pd(_mm256_mul_pd(vs, vc1), _mm256_mul_pd(vc, vs1)));
    }
    for (; i < n; ++i) {
      ck[i] = cp[i] * c1[i] - sp[i] * s1[i];
      sk[i] = sp[i] * c1[i] + cp[i] * s1[i];
    }
  }
}

}  // namespace gaitid::kernels::avx2

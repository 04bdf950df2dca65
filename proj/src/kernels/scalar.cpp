#include <cmath>

#include "gaitid/kernels.hpp"

namespace gaitid::kernels::scalar {

double dot(std::span<const double> a, std::span<const double> b) {
  // Four partial sums, same association as the vector variant's lanes.
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t n = a.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int l = 0; l < 4; ++l) acc[l] += a[i + l] * b[i + l];
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += a[i] * b[i];
  return ((acc[0] + acc[2]) + (acc[1] + acc[3])) + tail;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void central_diff(std::span<const double> x, double dt, std::span<double> out) {
  const double inv = 1.0 / (2.0 * dt);
  for (std::size_t i = 1; i + 1 < x.size(); ++i) out[i] = (x[i + 1] - x[i - 1]) * inv;
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
    for (std::size_t i = 0; i < n; ++i) {
      ck[i] = cp[i] * c1[i] - sp[i] * s1[i];
      sk[i] = sp[i] * c1[i] + cp[i] * s1[i];
    }
  }
}

}  // namespace gaitid::kernels::scalar

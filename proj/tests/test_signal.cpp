#include <cmath>
#include <random>

#include <doctest.h>

#include "gaitid/error.hpp"
#include "gaitid/linalg.hpp"
#include "gaitid/signal.hpp"

using namespace gaitid;

namespace {

std::vector<double> sine(std::size_t n, double dt, double f, double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(2 * M_PI * f * i * dt + phase);
  return x;
}

// Power in bins with frequency above fmin, from a plain DFT.
double band_power(const std::vector<double>& x, double dt, double fmin) {
  const std::size_t n = x.size();
  double p = 0.0;
  for (std::size_t k = 1; k < n / 2; ++k) {
    if (k / (n * dt) < fmin) continue;
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      re += x[i] * std::cos(2 * M_PI * k * i / n);
      im -= x[i] * std::sin(2 * M_PI * k * i / n);
    }
    p += re * re + im * im;
  }
  return p;
}

}  // namespace

TEST_SUITE("signal") {

TEST_CASE("zero-phase low-pass matches the reference filter") {
  // scipy.signal.filtfilt, 2nd-order Butterworth, odd padding (tools/oracles/oracles.py).
  const double dt = 0.01;
  std::vector<double> x(600);
  for (int i = 0; i < 600; ++i) {
    const double t = i * dt;
    x[i] = std::sin(2 * M_PI * 0.7 * t) + 0.4 * std::sin(2 * M_PI * 9.0 * t) + 0.1 * t;
  }
  const auto y = zero_phase_lowpass(x, dt, 2.0, 2);
  CHECK(y[150] == doctest::Approx(0.45446913137210637).epsilon(1e-9));
  CHECK(y[300] == doctest::Approx(0.87913470280400019).epsilon(1e-9));
  CHECK(y[450] == doctest::Approx(1.2471101453202673).epsilon(1e-9));
}

TEST_CASE("passband sine keeps amplitude and phase") {
  const double dt = 0.01, fc = 5.0, f = fc / 10.0;
  const auto x = sine(4000, dt, f);
  const auto y = zero_phase_lowpass(x, dt, fc, 2);
  // Least-squares amplitude and phase on the settled middle section.
  double sc = 0, ss = 0, cc = 0, sy = 0, cy = 0;
  for (std::size_t i = 1000; i < 3000; ++i) {
    const double a = 2 * M_PI * f * i * dt;
    sc += std::sin(a) * std::cos(a);
    ss += std::sin(a) * std::sin(a);
    cc += std::cos(a) * std::cos(a);
    sy += std::sin(a) * y[i];
    cy += std::cos(a) * y[i];
  }
  const double det = ss * cc - sc * sc;
  const double bs = (sy * cc - cy * sc) / det, bc = (cy * ss - sy * sc) / det;
  CHECK(std::hypot(bs, bc) == doctest::Approx(1.0).epsilon(0.01));
  CHECK(std::abs(std::atan2(bc, bs)) < 1e-3);
}

TEST_CASE("white noise above twice the cutoff is removed") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> x(2048);
  for (double& v : x) v = n(rng);
  const double dt = 0.01, fc = 5.0;
  const auto y = zero_phase_lowpass(x, dt, fc, 2);
  CHECK(band_power(y, dt, 2 * fc) <= 0.1 * band_power(x, dt, 2 * fc));
}

TEST_CASE("finite difference is second order") {
  auto err = [](double dt) {
    std::vector<double> x(static_cast<std::size_t>(std::round(6.0 / dt)));
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(i * dt);
    const auto d = finite_diff(x, dt);
    double e = 0;
    for (std::size_t i = 0; i < x.size(); ++i) e = std::max(e, std::abs(d[i] - std::cos(i * dt)));
    return e;
  };
  CHECK(err(0.02) / err(0.01) == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("Fourier fit recovers a low-order series") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 2 * M_PI);
  std::vector<double> phi(300), y(300);
  for (int i = 0; i < 300; ++i) {
    phi[i] = u(rng) + 2 * M_PI * (i % 3);
    y[i] = 0.3 + std::cos(phi[i]) - 2.0 * std::sin(2 * phi[i]);
  }
  for (int K : {2, 4}) {
    const FourierSeries f = fit_fourier(phi, y, K);
    const Eigen::MatrixXd& c = f.coefficients();
    CHECK(std::abs(c(0, 0) - 0.3) < 1e-10);
    CHECK(std::abs(c(1, 0) - 1.0) < 1e-10);
    CHECK(std::abs(c(2, 0)) < 1e-10);
    CHECK(std::abs(c(3, 0)) < 1e-10);
    CHECK(std::abs(c(4, 0) + 2.0) < 1e-10);
    for (Eigen::Index k = 5; k < c.rows(); ++k) CHECK(std::abs(c(k, 0)) < 1e-10);
  }
}

TEST_CASE("Fourier fit rejects poor phase coverage") {
  std::vector<double> phi, y;
  for (int i = 0; i < 100; ++i) {
    phi.push_back(0.01 * i);
    y.push_back(1.0);
  }
  CHECK_THROWS(fit_fourier(phi, y, 3));
}

TEST_CASE("Fourier derivative") {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(5, 1);
  c(2, 0) = 1.0;  // sin(phi)
  c(3, 0) = 0.5;  // 0.5 cos(2 phi)
  const FourierSeries d = FourierSeries(2, c).derivative(2.0);
  CHECK(d.eval(0.3, 0) == doctest::Approx(2.0 * (std::cos(0.3) - std::sin(0.6))));
}

TEST_CASE("PCA reconstruction error equals discarded variance") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd x(500, 4);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double a = n(rng), b = n(rng);
    x.row(i) << 3 * a, a + b, 0.5 * b + 0.1 * n(rng), 0.05 * n(rng);
  }
  const PcaResult p = pca_reduce(x, 2);
  const Eigen::MatrixXd rec = p.reconstruct(p.project(x));
  const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  const double err = (centered - (rec.rowwise() - p.mean)).squaredNorm() / (x.rows() - 1);
  CHECK(err == doctest::Approx(p.eigenvalues[2] + p.eigenvalues[3]).epsilon(1e-9));
  CHECK(p.components.col(0).dot(p.components.col(1)) == doctest::Approx(0.0));
}

TEST_CASE("least squares with multiple right-hand sides") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd X(200, 3), B(3, 2);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = n(rng);
  B << 1, -2, 0.5, 3, -1, 0.25;
  X.col(2) *= 1e4;
  const LeastSquaresFit f = least_squares(X, X * B);
  CHECK((f.coefficients - B).norm() < 1e-10);
  CHECK_FALSE(f.ridge);
  X.col(1).setZero();
  const LeastSquaresFit z = least_squares(X, X * B);
  CHECK(z.coefficients.row(1).norm() == 0.0);
}

}

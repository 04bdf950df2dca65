#include <cmath>

#include <doctest.h>

#include "fixtures.hpp"
#include "gaitid/error.hpp"
#include "gaitid/phase.hpp"

using namespace gaitid;

namespace {

// Phase with rate 1 + 0.5 cos(phase), integrated finely and sampled at dt.
std::vector<double> nonuniform_phase(double dt, std::size_t n) {
  std::vector<double> p(n);
  double x = 0.0;
  const int sub = 20;
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = x;
    for (int s = 0; s < sub; ++s) {
      const double h = dt / sub;
      auto f = [](double v) { return 1.0 + 0.5 * std::cos(v); };
      const double k1 = f(x), k2 = f(x + h / 2 * k1), k3 = f(x + h / 2 * k2), k4 = f(x + h * k3);
      x += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
  }
  return p;
}

}  // namespace

TEST_SUITE("phase") {

TEST_CASE("protophase of a circular orbit") {
  // whole turns so the sample covariance is isotropic
  const double w = 2 * M_PI / 4, dt = 0.01;
  Eigen::MatrixXd r(2800, 2);
  for (Eigen::Index i = 0; i < r.rows(); ++i) r.row(i) << std::cos(w * i * dt), std::sin(w * i * dt);
  const auto p = estimate_protophase(r);
  const double c = p[0];
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(p[i] - c - w * i * dt) < 1e-6);
}

TEST_CASE("protophase winds forward for a reversed orbit") {
  Eigen::MatrixXd r(1000, 2);
  for (Eigen::Index i = 0; i < r.rows(); ++i) r.row(i) << std::cos(0.05 * i), -2.0 * std::sin(0.05 * i);
  const auto p = estimate_protophase(r);
  CHECK(p.back() > p.front());
}

TEST_CASE("synchronized joints have no phase") {
  Eigen::MatrixXd r(500, 2);
  for (Eigen::Index i = 0; i < r.rows(); ++i) r.row(i) << std::sin(0.1 * i), std::sin(0.1 * i);
  CHECK_THROWS_AS(estimate_protophase(r), DegenerateOscillation);
}

TEST_CASE("correction makes a nonuniform oscillator uniform") {
  const double dt = 0.01;
  const auto proto = nonuniform_phase(dt, 20000);
  std::vector<double> t(proto.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = i * dt;
  const double before = phase_rate_cov(proto, dt);
  CHECK(before == doctest::Approx(0.35).epsilon(0.15));
  const auto fixed = correct_phase(proto, t);
  CHECK(phase_rate_cov(fixed, dt) < 0.05);
  CHECK(fit_phase_correction(proto, t).min_slope() > 0.0);
}

TEST_CASE("correction needs enough windings") {
  const auto proto = nonuniform_phase(0.01, 1000);
  std::vector<double> t(proto.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = i * 0.01;
  CHECK_THROWS_AS(correct_phase(proto, t), InvalidArgument);
}

TEST_CASE("clock phase and winding count") {
  const auto s = InputSchedule::repeat(CycleParams4{-1, 1, 4.0, 0.5}, 5);
  const auto t = s.sample_times(0.01);
  const auto phi = clock_phase(s, t);
  CHECK(phi[200] == doctest::Approx(M_PI));
  CHECK(winding_count(phi) == 5);
  CHECK(circular_correlation(phi, phi) == doctest::Approx(1.0));
}

TEST_CASE("data phase tracks clock phase on swimmer data") {
  const CycleParams p = CycleParams4{-1.0, 1.0, 8.0, 0.25};
  const Experiment ex = fixtures::steady_swimmer(p, 12);
  const auto clock = clock_phase(ex.schedule, ex.trajectory.t);
  const auto data = align_phase_origin(
      correct_phase(estimate_protophase(ex.trajectory.r), ex.trajectory.t), clock);
  CHECK(circular_correlation(clock, data) > 0.9);
  CHECK(winding_count(data) == winding_count(clock));
}

TEST_CASE("limit cycle of a band-limited signal") {
  const double dt = 0.01;
  std::vector<double> phi(4000), u(4000);
  Eigen::MatrixXd r(4000, 2);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    phi[i] = 0.9 * i * dt;
    const auto k = static_cast<Eigen::Index>(i);
    r(k, 0) = 0.2 + 0.3 * std::cos(phi[i]) - 0.05 * std::sin(3 * phi[i]);
    r(k, 1) = 0.1 * std::sin(phi[i]) + 0.02 * std::cos(7 * phi[i]);
    u[i] = std::cos(phi[i]);
  }
  const LimitCycle lc = extract_limit_cycle(phi, r, u, 7, 0.9);
  for (double q = 0.0; q < 2 * M_PI; q += 0.1) {
    const Eigen::VectorXd s = lc.shape.eval(q);
    CHECK(std::abs(s[0] - (0.2 + 0.3 * std::cos(q) - 0.05 * std::sin(3 * q))) < 1e-8);
    CHECK(std::abs(s[1] - (0.1 * std::sin(q) + 0.02 * std::cos(7 * q))) < 1e-8);
    CHECK(std::abs(lc.shape_rate.eval(q)[1] - 0.9 * (0.1 * std::cos(q) - 0.14 * std::sin(7 * q))) < 1e-7);
  }
}

TEST_CASE("limit-cycle input approximates a trapezoid within the Fourier remainder") {
  const CycleParams4 p{-1.0, 1.0, 8.0, 0.5};
  const auto s = InputSchedule::repeat(p, 10);
  const auto t = s.sample_times(0.01);
  const auto u = s.sample(t);
  const auto phi = clock_phase(s, t);
  Eigen::MatrixXd r(static_cast<Eigen::Index>(t.size()), 2);
  for (Eigen::Index i = 0; i < r.rows(); ++i) r.row(i) << std::cos(phi[i]), std::sin(phi[i]);
  const LimitCycle lc = extract_limit_cycle(phi, r, u, 7, 2 * M_PI / 8.0);
  // Odd harmonic k of a unit trapezoid with ramp width rho (radians) is at most
  // 8 / (pi rho k^2); the error is bounded by the tail beyond order 7.
  double tail = 0.0;
  const double ramp = M_PI / 2.0;
  for (int k = 9; k < 100001; k += 2) tail += 8.0 / (M_PI * ramp * k * k);
  double worst = 0.0;
  for (std::size_t i = 0; i < 800; ++i) worst = std::max(worst, std::abs(lc.input.eval(phi[i], 0) - u[i]));
  CHECK(worst <= tail);
  CHECK(worst > 0.0);
}

}

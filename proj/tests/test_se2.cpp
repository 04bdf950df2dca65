#include <cmath>
#include <random>

#include <doctest.h>

#include "gaitid/error.hpp"
#include "gaitid/se2.hpp"

using namespace gaitid;

TEST_SUITE("se2") {

TEST_CASE("hat and vee are inverse") {
  const Eigen::Vector3d v(0.3, -1.2, 0.7);
  CHECK((vee(hat(v)) - v).norm() == doctest::Approx(0.0));
  Eigen::Matrix3d bad = hat(v);
  bad(2, 0) = 1e-6;
  CHECK_THROWS_AS(vee(bad), InvalidArgument);
}

TEST_CASE("exp and log round trip") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const BodyVelocity xi{d(rng), d(rng), 0.9 * d(rng)};
    const BodyVelocity back = log_map(exp_map(xi));
    CHECK(back.vx == doctest::Approx(xi.vx).epsilon(1e-12));
    CHECK(back.vy == doctest::Approx(xi.vy).epsilon(1e-12));
    CHECK(back.omega == doctest::Approx(xi.omega).epsilon(1e-12));
  }
}

TEST_CASE("exp map matches a fine-step integration oracle") {
  // RK4 with 1e5 substeps of g' = g xi^ (tools/oracles/oracles.py).
  const Pose g = exp_map({1.0, 0.0, M_PI / 2});
  CHECK(g.x == doctest::Approx(0.63661977236737188).epsilon(1e-11));
  CHECK(g.y == doctest::Approx(0.6366197723677518).epsilon(1e-11));
  CHECK(g.theta == doctest::Approx(1.5707963267939657).epsilon(1e-11));

  Pose e;
  const int n = 10000;
  for (int i = 0; i < n; ++i) e = step_pose(e, {1.0, 0.0, M_PI / 2}, 1.0 / n, StepMethod::euler);
  CHECK(std::abs(e.x - g.x) < 1e-4);
  CHECK(std::abs(e.y - g.y) < 1e-4);
}

TEST_CASE("compose, inverse and relative") {
  const Pose a{1.0, 2.0, 0.5}, b{-0.3, 0.4, -2.9};
  const Pose id = compose(a, inverse(a));
  CHECK(std::abs(id.x) < 1e-15);
  CHECK(std::abs(id.y) < 1e-15);
  CHECK(std::abs(id.theta) < 1e-15);
  const Pose ab = compose(a, relative(a, b));
  CHECK(ab.x == doctest::Approx(b.x));
  CHECK(ab.y == doctest::Approx(b.y));
  CHECK(ab.theta == doctest::Approx(b.theta));
  CHECK(std::abs(compose(b, b).theta) <= M_PI);
}

TEST_CASE("body velocity of circular motion") {
  const double R = 2.0, w = 0.8;
  auto errors = [&](double dt) {
    std::vector<Pose> g;
    for (int i = 0; i < 200; ++i) {
      const double a = w * i * dt;
      g.push_back({R * std::sin(a), R * (1.0 - std::cos(a)), wrap_angle(a)});
    }
    const auto xi = body_velocity_from_poses(g, dt);
    double worst = 0.0;
    for (const auto& v : xi) {
      worst = std::max({worst, std::abs(v.vx - w * R), std::abs(v.vy), std::abs(v.omega - w)});
    }
    return worst;
  };
  const double e1 = errors(0.02), e2 = errors(0.01);
  CHECK(e1 < 1e-3);
  CHECK(e1 / e2 > 3.5);
}

TEST_CASE("euler step is first order, exp step exact for constant twist") {
  const BodyVelocity xi{0.7, 0.1, 1.3};
  const Pose exact = exp_map({2.0 * xi.vx, 2.0 * xi.vy, 2.0 * xi.omega});
  auto run = [&](int n, StepMethod m) {
    Pose g;
    for (int i = 0; i < n; ++i) g = step_pose(g, xi, 2.0 / n, m);
    return std::hypot(g.x - exact.x, g.y - exact.y);
  };
  CHECK(run(7, StepMethod::exp) < 1e-13);
  const double r = run(400, StepMethod::euler) / run(800, StepMethod::euler);
  CHECK(r == doctest::Approx(2.0).epsilon(0.05));
}

}

#include <cmath>
#include <random>

#include <doctest.h>

#include "gaitid/error.hpp"
#include "gaitid/plant.hpp"
#include "gaitid/waveform.hpp"

using namespace gaitid;

TEST_SUITE("plant") {

TEST_CASE("local connection matches the quadrature oracle") {
  // Independent world-frame drag quadrature (tools/oracles/oracles.py).
  struct Row {
    Eigen::Vector2d r;
    double a[3][2];
  };
  const Row rows[] = {
      {{0.3, -0.2},
       {{-0.058406466875899621, -0.050850402398643003},
        {0.16006868948006273, 0.16056584043577962},
        {0.25976068385051981, -0.26251523904391599}}},
      {{-0.45, 0.1},
       {{0.073401928931474819, 0.046856264860031541},
        {0.15712736658559437, 0.15910560756381012},
        {0.25554236868941138, -0.26633874035616467}}},
      {{0.25, 0.25},
       {{-0.018518113639889124, 0.018518113639889124},
        {0.1648487982105043, 0.1648487982105043},
        {0.2581039328781724, -0.2581039328781724}}},
  };
  for (const Row& row : rows) {
    const auto A = local_connection(row.r, {});
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 2; ++j) CHECK(std::abs(A(i, j) - row.a[i][j]) < 1e-12);
  }
}

TEST_CASE("wrench balance at xi = -A r_dot") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-0.5, 0.5);
  const SwimmerConfig cfg;
  for (int i = 0; i < 200; ++i) {
    const Eigen::Vector2d r(d(rng), d(rng)), rd(4 * d(rng), 4 * d(rng));
    const Eigen::Vector3d xi = -local_connection(r, cfg) * rd;
    const LinkWrenches w = swimmer_wrenches(r, rd, xi, cfg);
    const double scale = w.links[0].norm() + w.links[1].norm() + w.links[2].norm();
    CHECK(w.total().norm() <= 1e-10 * scale);
  }
}

TEST_CASE("mirrored gait mirrors the displacement") {
  // Negating both joints reflects the body about its own x axis.
  const SwimmerPlant plant;
  const auto s = InputSchedule::repeat(CycleParams4{-1.0, 1.0, 8.0, 0.25}, 3);
  const auto a = simulate(plant, [&](double t) { return s.value(t); }, 2400, 0.01);
  const auto b = simulate(plant, [&](double t) { return -s.value(t); }, 2400, 0.01);
  CHECK(b.g.back().x == doctest::Approx(a.g.back().x).epsilon(1e-10));
  CHECK(b.g.back().y == doctest::Approx(-a.g.back().y).epsilon(1e-10));
  CHECK(b.g.back().theta == doctest::Approx(-a.g.back().theta).epsilon(1e-10));
  CHECK(std::abs(a.g.back().x) > 1e-3);
}

TEST_CASE("step response decays exponentially") {
  const SwimmerPlant plant;
  const double dt = 0.01;
  const auto tr = simulate(plant, [](double) { return 1.0; }, 500, dt, {},
                           Eigen::VectorXd(Eigen::Vector2d(-0.5, -0.5)));
  const Eigen::Vector2d rs = plant.config().steady_state(1.0);
  for (std::size_t k = 0; k < tr.size(); k += 50) {
    for (int i = 0; i < 2; ++i) {
      const double expected = (-0.5 - rs[i]) * std::exp(-plant.config().rate[i] * tr.t[k]);
      CHECK(tr.r(static_cast<Eigen::Index>(k), i) - rs[i] == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("surrogate plant: swelling is ten times slower than shrinking") {
  const SurrogatePlant plant;
  const double dt = 0.001;
  auto time_to_95 = [&](double from, double to) {
    const Eigen::VectorXd r0 = plant.steady_state(from);
    const auto tr = simulate(plant, [&](double) { return to; }, 20000, dt, {}, r0);
    const double target = plant.steady_state(to)[0];
    for (std::size_t k = 0; k < tr.size(); ++k) {
      if (std::abs(tr.r(static_cast<Eigen::Index>(k), 0) - target) <= 0.05 * std::abs(r0[0] - target)) {
        return tr.t[k];
      }
    }
    return tr.t.back();
  };
  // Cooling raises the set point (swelling); heating lowers it (shrinking).
  const double swell = time_to_95(65.0, 20.0);
  const double shrink = time_to_95(20.0, 65.0);
  CHECK(swell / shrink == doctest::Approx(10.0).epsilon(0.02));
}

TEST_CASE("joint limit violation raises") {
  SwimmerConfig cfg;
  const SwimmerPlant plant(cfg);
  CHECK_THROWS_AS(simulate(plant, [](double) { return 0.0; }, 10, 0.01, {},
                           Eigen::VectorXd(Eigen::Vector2d(0.9, 0.0))),
                  NumericalError);
  cfg.slope = {1.0, 1.0};
  CHECK_THROWS_AS(SwimmerPlant{cfg}, InvalidArgument);
}

TEST_CASE("loop area of a unit square") {
  Eigen::MatrixXd sq(4, 2);
  sq << 0, 0, 1, 0, 1, 1, 0, 1;
  CHECK(loop_area(sq) == doctest::Approx(1.0));
  CHECK(loop_area(sq.colwise().reverse()) == doctest::Approx(-1.0));
}

}

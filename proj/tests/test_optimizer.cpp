#include <cmath>

#include <doctest.h>

#include "fixtures.hpp"
#include "gaitid/error.hpp"
#include "gaitid/optimizer.hpp"

using namespace gaitid;

TEST_SUITE("optimizer") {

TEST_CASE("gradient of a quadratic") {
  Eigen::Matrix3d Q;
  Q << 2, 0.5, 0, 0.5, 1, -0.3, 0, -0.3, 3;
  const ScalarFunction f = [&](const Eigen::VectorXd& x) { return x.dot(Q * x); };
  const Eigen::Vector3d x(0.3, -0.2, 0.9);
  const Eigen::Vector3d exact = 2 * Q * x;
  const Eigen::VectorXd g = fd_gradient(f, x, Eigen::Vector3d::Constant(1e-3));
  CHECK((g - exact).norm() < 1e-9);
  // One-sided stencil at the bound is also exact for quadratics.
  const Eigen::VectorXd gb = fd_gradient(f, x, Eigen::Vector3d::Constant(1e-3), x,
                                         Eigen::Vector3d::Constant(2.0));
  CHECK((gb - exact).norm() < 1e-9);
}

TEST_CASE("central difference error drops sixteenfold when h is quartered") {
  const ScalarFunction f = [](const Eigen::VectorXd& x) { return std::exp(x[0]) * std::sin(2 * x[1]); };
  const Eigen::Vector2d x(0.4, 0.3);
  const Eigen::Vector2d exact(std::exp(0.4) * std::sin(0.6), 2 * std::exp(0.4) * std::cos(0.6));
  const double e1 = (fd_gradient(f, x, Eigen::Vector2d::Constant(4e-2)) - exact).norm();
  const double e2 = (fd_gradient(f, x, Eigen::Vector2d::Constant(1e-2)) - exact).norm();
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.05));
}

TEST_CASE("non-finite objective raises") {
  const ScalarFunction f = [](const Eigen::VectorXd& x) { return x[0] > 0.5 ? NAN : x[0]; };
  CHECK_THROWS_AS(fd_gradient(f, Eigen::VectorXd::Constant(1, 0.5), Eigen::VectorXd::Constant(1, 0.1)),
                  NumericalError);
}

TEST_CASE("concave quadratic with interior maximum") {
  const Eigen::Vector3d lo(0, -5, 10), hi(1, 5, 30), xstar(0.3, 1.0, 22.0);
  const Eigen::Vector3d scale = hi - lo;
  int outside = 0;
  const ScalarFunction f = [&](const Eigen::VectorXd& x) {
    if ((x.array() < lo.array()).any() || (x.array() > hi.array()).any()) ++outside;
    const Eigen::VectorXd z = (x - xstar).cwiseQuotient(scale);
    return 1.0 - z.dot(Eigen::Vector3d(3, 1, 2).asDiagonal() * z) - 0.5 * z[0] * z[1];
  };
  const OptimizeResult r = optimize_box(f, lo, hi, 0.5 * (lo + hi));
  CHECK(r.converged);
  CHECK(((r.x - xstar).cwiseQuotient(scale)).cwiseAbs().maxCoeff() < 1e-4);
  CHECK(outside == 0);
  CHECK(r.f >= r.f0);
}

TEST_CASE("linear objective ends on the box corner") {
  const Eigen::Vector2d lo(0, 0), hi(1, 2);
  const ScalarFunction f = [](const Eigen::VectorXd& x) { return x[0] - x[1]; };
  const OptimizeResult r = optimize_box(f, lo, hi, Eigen::Vector2d(0.5, 1.0));
  CHECK(r.x[0] == doctest::Approx(1.0));
  CHECK(r.x[1] == doctest::Approx(0.0));
}

TEST_CASE("model objective agrees with the plant within the model error budget") {
  const GaitModel& m = fixtures::swimmer_model();
  const SwimmerPlant plant;
  ObjectiveOptions o;
  o.samples_per_cycle = 1200;
  for (const CycleParams& p : {CycleParams{CycleParams4{-0.6, 0.6, 8.0, 0.5}},
                               CycleParams{CycleParams4{-0.9, 0.9, 10.0, 0.1}}}) {
    const ObjectiveValue a = objective_eval(m, p, o);
    const ObjectiveValue b = verify_on_plant(plant, p, o);
    MESSAGE("model " << a.dx << " plant " << b.dx);
    CHECK(a.t_cycle == b.t_cycle);
    CHECK(std::abs(a.dx - b.dx) < 0.3 * std::abs(b.dx));
  }
}

TEST_CASE("iterate_refine history shape") {
  IterateConfig cfg;
  cfg.n_iters = 2;
  cfg.n_samples = 40;
  cfg.lambda = 0.0;
  const SwimmerPlant plant;
  const ParamBox full = builtin_box("swimmer-full");
  int calls = 0;
  const OptimizationHistory h = iterate_refine(plant, full, cfg, [&](const IterationRecord&) { ++calls; });
  REQUIRE(h.iterations.size() == 2);
  CHECK(calls == 2);
  const ParamBox& b1 = h.iterations[0].box;
  const ParamBox& b2 = h.iterations[1].box;
  CHECK((b2.lo.array() >= b1.lo.array() - 1e-12).all());
  CHECK((b2.hi.array() <= b1.hi.array() + 1e-12).all());
  CHECK((b2.width() - cfg.retained_width * b1.width()).norm() < 1e-12);
  for (const auto& it : h.iterations) {
    CHECK(it.box.contains(to_vector(it.optimum), 1e-12));
    CHECK(it.samples.size() == 40);
  }
  CHECK(h.iterations[1].incumbent_verified.F >= h.iterations[0].incumbent_verified.F);
}

}

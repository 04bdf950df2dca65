#include <cmath>

#include <doctest.h>

#include "fixtures.hpp"
#include "gaitid/prediction.hpp"

using namespace gaitid;

TEST_SUITE("prediction") {

TEST_CASE("improvement metric anchors") {
  Eigen::MatrixXd truth(4, 3), base(4, 3);
  truth << 1, 2, 3, 4, 5, 6, 7, 8, 9, 1, 1, 1;
  base = truth.array() + 0.5;
  CHECK(gamma_metric(truth, base, truth) == 1.0);
  CHECK(gamma_metric(base, base, truth) == 0.0);
  CHECK(gamma_metric(truth, truth, truth) == 1.0);
  CHECK(std::isinf(gamma_metric(base, truth, truth)));
  // Euclidean row norm: one row off by (3, 4, 0) contributes 5.
  Eigen::MatrixXd p = truth;
  p.row(0) += Eigen::RowVector3d(3, 4, 0);
  CHECK(summed_error(p, truth) == doctest::Approx(5.0));
}

TEST_CASE("nominal cycle is reproduced by a model fit on unperturbed data") {
  const CycleParams p = CycleParams4{-0.6, 0.6, 8.0, 0.25};
  const Experiment ex = fixtures::steady_swimmer(p, 20);
  const PipelineConfig cfg;
  const PreparedData d = preprocess(ex, cfg);
  const GaitModel m = fit_gait_model(d, cfg);
  const auto s = InputSchedule::repeat(p, 3);
  const Prediction pr = predict(m, s, 0.01);
  const Eigen::MatrixXd lc = m.limit_cycle().shape.eval_many(pr.phi);
  const double amp = (lc.colwise().maxCoeff() - lc.colwise().minCoeff()).norm() / 2.0;
  const double rms = std::sqrt((pr.r_hat - lc).rowwise().squaredNorm().mean());
  CHECK(rms < 0.02 * amp);
}

TEST_CASE("euler predictor converges at first order") {
  const GaitModel& m = fixtures::swimmer_model();
  const auto s = InputSchedule::repeat(CycleParams4{-0.8, 0.7, 6.0, 0.25}, 2);
  const Pose ref = predict(m, s, 0.01 / 64).g_hat.back();
  auto err = [&](double dt) {
    const Pose g = predict(m, s, dt).g_hat.back();
    return std::hypot(g.x - ref.x, g.y - ref.y);
  };
  const double ratio = err(0.02) / err(0.01);
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("first-order shape prediction beats the baseline on held-out cycles") {
  const PreparedData& d = fixtures::swimmer_data();
  std::vector<bool> train(d.cycles, true);
  for (std::size_t c = 80; c < d.cycles; ++c) train[c] = false;
  const GaitModel m = fit_gait_model(d, {}, train);
  double e_pred = 0.0, e_base = 0.0;
  for (const CycleSlice& sl : cycle_slices(d)) {
    const std::size_t c = static_cast<std::size_t>(d.cycle[sl.begin]);
    if (train[c]) continue;
    const std::size_t n = sl.end - sl.begin;
    const std::span<const double> t(d.t.data() + sl.begin, n), u(d.u.data() + sl.begin, n),
        phi(d.phi_clock.data() + sl.begin, n);
    const Eigen::MatrixXd truth = d.r.middleRows(static_cast<Eigen::Index>(sl.begin),
                                                 static_cast<Eigen::Index>(n));
    e_pred += summed_error(predict(m, t, u, phi, d.dt).r_hat, truth);
    e_base += summed_error(baseline_predict(m, t, u, phi, d.dt).r_hat, truth);
  }
  CHECK(e_base >= e_pred);
}

TEST_CASE("body velocity from true shapes") {
  const PreparedData& d = fixtures::swimmer_data();
  const Eigen::MatrixXd xi = xi_from_shapes(fixtures::swimmer_model(), d.phi, d.r, d.r_dot);
  REQUIRE(xi.rows() == static_cast<Eigen::Index>(d.size()));
  const double rel = (xi - d.xi).norm() / d.xi.norm();
  CHECK(rel < 0.2);
}

}

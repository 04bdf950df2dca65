#include "gaitid/prediction.hpp"

#include <cmath>
#include <limits>

#include "gaitid/error.hpp"

namespace gaitid {

namespace {

void check_lengths(std::span<const double> t, std::span<const double> u,
                   std::span<const double> phi, double dt) {
  if (t.size() != u.size() || t.size() != phi.size()) {
    throw InvalidArgument("predict: t, u and phase lengths differ");
  }
  if (t.empty()) throw InvalidArgument("predict: empty input");
  if (!(dt > 0.0)) throw InvalidArgument("predict: dt must be positive");
}

Prediction start(std::span<const double> t, std::span<const double> u,
                 std::span<const double> phi, int n) {
  Prediction p;
  p.t.assign(t.begin(), t.end());
  p.u.assign(u.begin(), u.end());
  p.phi.assign(phi.begin(), phi.end());
  const auto rows = static_cast<Eigen::Index>(t.size());
  p.r_hat.resize(rows, n);
  p.r_dot_hat.resize(rows, n);
  p.xi_hat.resize(t.size());
  p.g_hat.resize(t.size());
  return p;
}

}  // namespace

Eigen::MatrixXd Prediction::xi_matrix() const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(xi_hat.size()), 3);
  for (size_t i = 0; i < xi_hat.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = xi_hat[i].vector().transpose();
  }
  return out;
}

Prediction predict(const GaitModel& model, std::span<const double> t, std::span<const double> u,
                   std::span<const double> phi, double dt, const Pose& g0,
                   const PredictOptions& opts) {
  check_lengths(t, u, phi, dt);
  const LimitCycle& lc = model.limit_cycle();
  const int n = model.shape_dim();
  Prediction p = start(t, u, phi, n);

  Eigen::VectorXd r = lc.shape.eval(phi[0]);
  Pose g = g0;
  for (size_t i = 0; i < t.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const CoefficientSet q = model.query(phi[i]);
    const Eigen::VectorXd dr = r - lc.shape.eval(phi[i]);
    const double du = u[i] - lc.input.eval(phi[i], 0);
    const Eigen::VectorXd dr_dot = q.actuator.eval(dr, du);
    const Eigen::VectorXd r_dot = lc.shape_rate.eval(phi[i]) + dr_dot;
    const BodyVelocity xi = BodyVelocity::from_vector(q.body.eval(dr, dr_dot));

    p.r_hat.row(row) = r.transpose();
    p.r_dot_hat.row(row) = r_dot.transpose();
    p.xi_hat[i] = xi;
    p.g_hat[i] = g;

    r += dt * r_dot;
    g = step_pose(g, xi, dt, opts.method);
  }
  return p;
}

Prediction predict(const GaitModel& model, const InputSchedule& schedule, double dt,
                   const Pose& g0, const PredictOptions& opts) {
  const std::vector<double> t = schedule.sample_times(dt);
  const std::vector<double> u = schedule.sample(t);
  std::vector<double> phi(t.size());
  for (size_t i = 0; i < t.size(); ++i) phi[i] = schedule.phase(t[i]);
  return predict(model, t, u, phi, dt, g0, opts);
}

Prediction baseline_predict(const GaitModel& model, std::span<const double> t,
                            std::span<const double> u, std::span<const double> phi, double dt,
                            const Pose& g0, const PredictOptions& opts) {
  check_lengths(t, u, phi, dt);
  const LimitCycle& lc = model.limit_cycle();
  Prediction p = start(t, u, phi, model.shape_dim());
  Pose g = g0;
  for (size_t i = 0; i < t.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const CoefficientSet q = model.query(phi[i]);
    const BodyVelocity xi = BodyVelocity::from_vector(q.body.C);
    p.r_hat.row(row) = lc.shape.eval(phi[i]).transpose();
    p.r_dot_hat.row(row) = lc.shape_rate.eval(phi[i]).transpose();
    p.xi_hat[i] = xi;
    p.g_hat[i] = g;
    g = step_pose(g, xi, dt, opts.method);
  }
  return p;
}

Prediction baseline_predict(const GaitModel& model, const InputSchedule& schedule, double dt,
                            const Pose& g0, const PredictOptions& opts) {
  const std::vector<double> t = schedule.sample_times(dt);
  const std::vector<double> u = schedule.sample(t);
  std::vector<double> phi(t.size());
  for (size_t i = 0; i < t.size(); ++i) phi[i] = schedule.phase(t[i]);
  return baseline_predict(model, t, u, phi, dt, g0, opts);
}

Eigen::MatrixXd xi_from_shapes(const GaitModel& model, std::span<const double> phi,
                               const Eigen::MatrixXd& r, const Eigen::MatrixXd& r_dot) {
  const auto n = static_cast<Eigen::Index>(phi.size());
  if (r.rows() != n || r_dot.rows() != n) throw InvalidArgument("xi_from_shapes: length mismatch");
  const LimitCycle& lc = model.limit_cycle();
  Eigen::MatrixXd out(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ph = phi[static_cast<size_t>(i)];
    const CoefficientSet q = model.query(ph);
    const Eigen::VectorXd dr = r.row(i).transpose() - lc.shape.eval(ph);
    const Eigen::VectorXd dr_dot = r_dot.row(i).transpose() - lc.shape_rate.eval(ph);
    out.row(i) = q.body.eval(dr, dr_dot).transpose();
  }
  return out;
}

double summed_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidArgument("summed_error: shape mismatch");
  }
  return (a - b).rowwise().norm().sum();
}

double gamma_metric(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& baseline,
                    const Eigen::MatrixXd& truth) {
  if (truth.rows() < 1) throw InvalidArgument("gamma_metric: need at least one sample");
  const double num = summed_error(pred, truth);
  const double den = summed_error(baseline, truth);
  if (den == 0.0) return num == 0.0 ? 1.0 : -std::numeric_limits<double>::infinity();
  return 1.0 - num / den;
}

}  // namespace gaitid

#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "gaitid/gait_model.hpp"
#include "gaitid/se2.hpp"
#include "gaitid/waveform.hpp"

namespace gaitid {

/// Predicted series, one entry (row) per input sample.
struct Prediction {
  std::vector<double> t, u, phi;
  Eigen::MatrixXd r_hat, r_dot_hat;
  std::vector<BodyVelocity> xi_hat;
  std::vector<Pose> g_hat;

  std::size_t size() const { return t.size(); }
  Eigen::MatrixXd xi_matrix() const;
};

struct PredictOptions {
  StepMethod method = StepMethod::euler;
};

/**
 * First-order prediction from a commanded input. The shape starts on the limit
 * cycle; at each sample the actuator model gives the shape-velocity
 * perturbation, the shape is advanced by one Euler step, and the body-velocity
 * model gives the twist used to step the pose.
 *
 * phi is the clock phase of each sample and must have the same length as t and u.
 */
Prediction predict(const GaitModel& model, std::span<const double> t, std::span<const double> u,
                   std::span<const double> phi, double dt, const Pose& g0 = {},
                   const PredictOptions& opts = {});

/// Same, sampling the schedule (input and clock phase) at its own sample times.
Prediction predict(const GaitModel& model, const InputSchedule& schedule, double dt,
                   const Pose& g0 = {}, const PredictOptions& opts = {});

/// Zeroth-order baseline: r' = theta_r_dot(phi), xi = C(phi); perturbations ignored.
Prediction baseline_predict(const GaitModel& model, std::span<const double> t,
                            std::span<const double> u, std::span<const double> phi, double dt,
                            const Pose& g0 = {}, const PredictOptions& opts = {});
Prediction baseline_predict(const GaitModel& model, const InputSchedule& schedule, double dt,
                            const Pose& g0 = {}, const PredictOptions& opts = {});

/// Body velocity from the body-velocity model driven by given shapes and shape
/// velocities (no shape prediction), one row per sample.
Eigen::MatrixXd xi_from_shapes(const GaitModel& model, std::span<const double> phi,
                               const Eigen::MatrixXd& r, const Eigen::MatrixXd& r_dot);

/**
 * Improvement over baseline: 1 - sum |pred - truth| / sum |baseline - truth|,
 * Euclidean norm per row. Returns -infinity when the baseline error is zero but
 * the prediction error is not, and 1 when both are zero.
 */
double gamma_metric(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& baseline,
                    const Eigen::MatrixXd& truth);

/// Sum over rows of the Euclidean row norm of a - b.
double summed_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace gaitid

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gaitid/phase.hpp"
#include "gaitid/se2.hpp"
#include "gaitid/signal.hpp"

namespace gaitid {

struct GaitModelOptions {
  int windows = 24;
  int coeff_order = 4;
  int limit_cycle_order = 7;
  /// Ridge weight on the dr-driven body-velocity terms (B, dA), in units of
  /// each equilibrated column's energy.
  double shape_penalty = 0.1;
};

/// Window index of each phase on M uniform arcs [2 pi m / M, 2 pi (m+1) / M).
/// Throws NumericalError if any window is empty.
std::vector<int> assign_windows(std::span<const double> phi, int windows);

/// Samples per window.
std::vector<std::size_t> window_counts(std::span<const int> window, int windows);

/**
 * @brief Perturbations of every sample about a limit cycle.
 *
 * delta_r = r - theta_r(phi), delta_u = u - theta_u(phi),
 * delta_r_dot = r_dot - theta_r_dot(phi). One row per sample.
 */
struct RegressionDataset {
  std::vector<double> phi;
  Eigen::MatrixXd delta_r, delta_r_dot;
  Eigen::VectorXd delta_u;
  Eigen::MatrixXd xi;  // samples x 3
  std::vector<int> window;
  std::vector<std::size_t> counts;
  int windows = 0;

  std::size_t size() const { return phi.size(); }
  int shape_dim() const { return static_cast<int>(delta_r.cols()); }
};

RegressionDataset build_dataset(const LimitCycle& lc, std::span<const double> phi,
                                const Eigen::MatrixXd& r, const Eigen::MatrixXd& r_dot,
                                std::span<const double> u, const Eigen::MatrixXd& xi, int windows);

/// xi_k ~ C_k + B_k dr + A_k dr' + dA_k vec(dr dr'^T), one row per body coordinate.
/// dA column i*n + j multiplies dr_i * dr'_j.
struct BodyVelWindow {
  Eigen::Vector3d C = Eigen::Vector3d::Zero();
  Eigen::MatrixXd B, A, dA;
  bool degenerate = false;  // perturbation regressors had no variance; only C fitted
  bool ridge = false;
  double condition = 1.0;
  std::size_t samples = 0;

  Eigen::Vector3d eval(const Eigen::VectorXd& dr, const Eigen::VectorXd& dr_dot) const;
};

/// dr' ~ D + E_r dr + E_u du
struct ActuatorWindow {
  Eigen::VectorXd D;
  Eigen::MatrixXd E_r;
  Eigen::VectorXd E_u;
  bool degenerate = false;
  bool ridge = false;
  double condition = 1.0;
  std::size_t samples = 0;

  Eigen::VectorXd eval(const Eigen::VectorXd& dr, double du) const;
};

std::vector<BodyVelWindow> fit_bodyvel_model(const RegressionDataset& ds, double shape_penalty = 0.0);
std::vector<ActuatorWindow> fit_actuator_model(const RegressionDataset& ds);

/// Scalar coefficients per window: 3 (1 + 2n + n^2) body-velocity terms
/// followed by n (2 + n) actuator terms.
int coefficient_count(int shape_dim);
Eigen::VectorXd pack_coefficients(const BodyVelWindow& b, const ActuatorWindow& a);
void unpack_coefficients(const Eigen::Ref<const Eigen::VectorXd>& v, int shape_dim,
                         BodyVelWindow& b, ActuatorWindow& a);

/// Both models evaluated at one phase.
struct CoefficientSet {
  BodyVelWindow body;
  ActuatorWindow actuator;
};

/**
 * @brief Limit cycle plus phase-windowed first-order models, smoothed across
 * windows by Fourier series so every coefficient is a periodic function of phase.
 */
class GaitModel {
 public:
  GaitModel() = default;
  GaitModel(LimitCycle lc, GaitModelOptions opts, std::vector<BodyVelWindow> body,
            std::vector<ActuatorWindow> actuator);

  CoefficientSet query(double phi) const;

  const LimitCycle& limit_cycle() const { return lc_; }
  const GaitModelOptions& options() const { return opts_; }
  const std::vector<BodyVelWindow>& body_windows() const { return body_; }
  const std::vector<ActuatorWindow>& actuator_windows() const { return actuator_; }
  const FourierSeries& smoothed() const { return smooth_; }
  int shape_dim() const { return lc_.shape_dim(); }
  /// Phase at the center of window m.
  double window_center(int m) const;

  std::string to_json() const;
  static GaitModel from_json(const std::string& text);

 private:
  LimitCycle lc_;
  GaitModelOptions opts_;
  std::vector<BodyVelWindow> body_;
  std::vector<ActuatorWindow> actuator_;
  FourierSeries smooth_;
};

/// Fourier fit (order K) of every packed coefficient over window-center phases.
FourierSeries smooth_coefficients(const std::vector<BodyVelWindow>& body,
                                  const std::vector<ActuatorWindow>& actuator, int order);

/// Limit cycle, dataset and smoothed models from one preprocessed record.
GaitModel fit_gait_model(std::span<const double> phi, const Eigen::MatrixXd& r,
                         const Eigen::MatrixXd& r_dot, std::span<const double> u,
                         const Eigen::MatrixXd& xi, double mean_phase_rate,
                         const GaitModelOptions& opts = {});

}  // namespace gaitid

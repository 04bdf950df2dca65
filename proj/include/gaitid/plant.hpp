#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gaitid/se2.hpp"

namespace gaitid {

using ConnectionMatrix = Eigen::Matrix<double, 3, Eigen::Dynamic>;

/**
 * @brief Three-link swimmer in a resistive (viscous) medium with first-order
 * joint dynamics r_i' = c_i (a_i T + b_i - r_i).
 *
 * Joint angles: r1 is the head link's angle relative to the middle link, r2 is
 * the middle link's angle relative to the tail link. The body frame sits at the
 * middle-link center with x along the middle link, pointing to the head.
 */
struct SwimmerConfig {
  double link_length = 1.0;
  double drag_ratio = 2.0;         // lateral / longitudinal drag
  double longitudinal_drag = 1.0;  // per unit length
  Eigen::Vector2d rate{1.0, 0.5};
  Eigen::Vector2d slope{0.5, 0.5};
  Eigen::Vector2d offset{0.0, 0.0};
  double joint_limit = 0.5;
  double input_min = -1.0;
  double input_max = 1.0;

  void validate() const;
  Eigen::Vector2d steady_state(double T) const { return slope * T + offset; }
};

/// Per-link drag wrench (fx, fy, torque about the body origin), body frame.
struct LinkWrenches {
  std::array<Eigen::Vector3d, 3> links;
  Eigen::Vector3d total() const { return links[0] + links[1] + links[2]; }
};

/// Viscous wrench on each link for body twist xi and joint rates r_dot, using
/// resistive-force drag integrated analytically along every link.
LinkWrenches swimmer_wrenches(const Eigen::Vector2d& r, const Eigen::Vector2d& r_dot,
                              const Eigen::Vector3d& xi, const SwimmerConfig& cfg);

/// A(r) such that xi = -A(r) r_dot balances the total viscous wrench.
Eigen::Matrix<double, 3, 2> local_connection(const Eigen::Vector2d& r, const SwimmerConfig& cfg);

/// r_i' = c_i (a_i T + b_i - r_i)
Eigen::Vector2d actuator_rhs(const Eigen::Vector2d& r, double T, const SwimmerConfig& cfg);

/**
 * @brief Hydrogel-like surrogate: segment volumes relax toward a temperature
 * set point at a rate that depends on direction (swelling vs shrinking).
 *
 * The locomotion side reuses the swimmer connection on effective bending angles
 * q = gain * (r - reference), giving A_sur(r) = A_swim(q) * gain.
 */
struct SurrogateConfig {
  SwimmerConfig geometry;
  Eigen::Vector2d rate_swell{0.6, 0.3};  // used while the set point is above r
  Eigen::Vector2d rate_shrink{6.0, 3.0};
  Eigen::Vector2d slope{-0.4 / 45.0, -0.4 / 45.0};
  Eigen::Vector2d offset{1.0 + 0.4 * 20.0 / 45.0, 1.0 + 0.4 * 20.0 / 45.0};
  double gain = 2.5;
  double reference = 0.8;
  double volume_min = 0.55;
  double volume_max = 1.05;
  double input_min = 20.0;
  double input_max = 65.0;

  void validate() const;
  Eigen::Vector2d steady_state(double T) const { return slope * T + offset; }
};

Eigen::Vector2d surrogate_rhs(const Eigen::Vector2d& r, double T, const SurrogateConfig& cfg);
Eigen::Matrix<double, 3, 2> surrogate_connection(const Eigen::Vector2d& r,
                                                 const SurrogateConfig& cfg);

/// Ground-truth plant: shape dynamics r' = f(r, u) and local connection A(r).
class Plant {
 public:
  virtual ~Plant() = default;
  virtual std::string name() const = 0;
  virtual int shape_dim() const = 0;
  virtual Eigen::VectorXd shape_rate(const Eigen::VectorXd& r, double u) const = 0;
  virtual ConnectionMatrix connection(const Eigen::VectorXd& r) const = 0;
  virtual Eigen::VectorXd steady_state(double u) const = 0;
  /// Throws NumericalError if r is outside the configured shape limits.
  virtual void check_limits(const Eigen::VectorXd& r, double t) const = 0;
  virtual double input_min() const = 0;
  virtual double input_max() const = 0;
};

class SwimmerPlant final : public Plant {
 public:
  explicit SwimmerPlant(SwimmerConfig cfg = {});
  std::string name() const override { return "swimmer"; }
  int shape_dim() const override { return 2; }
  Eigen::VectorXd shape_rate(const Eigen::VectorXd& r, double u) const override;
  ConnectionMatrix connection(const Eigen::VectorXd& r) const override;
  Eigen::VectorXd steady_state(double u) const override;
  void check_limits(const Eigen::VectorXd& r, double t) const override;
  double input_min() const override { return cfg_.input_min; }
  double input_max() const override { return cfg_.input_max; }
  const SwimmerConfig& config() const { return cfg_; }

 private:
  SwimmerConfig cfg_;
};

class SurrogatePlant final : public Plant {
 public:
  explicit SurrogatePlant(SurrogateConfig cfg = {});
  std::string name() const override { return "surrogate"; }
  int shape_dim() const override { return 2; }
  Eigen::VectorXd shape_rate(const Eigen::VectorXd& r, double u) const override;
  ConnectionMatrix connection(const Eigen::VectorXd& r) const override;
  Eigen::VectorXd steady_state(double u) const override;
  void check_limits(const Eigen::VectorXd& r, double t) const override;
  double input_min() const override { return cfg_.input_min; }
  double input_max() const override { return cfg_.input_max; }
  const SurrogateConfig& config() const { return cfg_; }

 private:
  SurrogateConfig cfg_;
};

/**
 * @brief Regularly sampled record of one experiment.
 *
 * r and r_dot hold one row per sample and one column per shape variable.
 */
struct Trajectory {
  double dt = 0.0;
  std::vector<double> t, u;
  Eigen::MatrixXd r, r_dot;
  std::vector<BodyVelocity> xi;
  std::vector<Pose> g;

  std::size_t size() const { return t.size(); }
  int shape_dim() const { return static_cast<int>(r.cols()); }
};

/**
 * Integrate the plant under input(t) with fixed-step RK4 on the shape, record
 * xi = -A(r) r' at every sample, and step the pose with the group exponential
 * of the midpoint body velocity. Throws NumericalError on a shape-limit
 * violation. The initial shape defaults to the steady state at input(t0).
 */
Trajectory simulate(const Plant& plant, const std::function<double(double)>& input,
                    std::size_t samples, double dt, const Pose& g0 = {},
                    const std::optional<Eigen::VectorXd>& r0 = std::nullopt, double t0 = 0.0);

/// Same, for a sampled input; mid-step inputs are linearly interpolated.
Trajectory simulate(const Plant& plant, std::span<const double> u, double dt, const Pose& g0 = {},
                    const std::optional<Eigen::VectorXd>& r0 = std::nullopt);

/// Signed area enclosed by a planar closed curve (shoelace, closing segment
/// included).
double loop_area(const Eigen::MatrixXd& r2);

}  // namespace gaitid

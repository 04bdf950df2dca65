#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace gaitid {

/// Wrap an angle into (-pi, pi].
double wrap_angle(double theta);

/**
 * @brief Planar rigid-body pose, an element of SE(2).
 *
 * Position is in body lengths, heading in radians. Every operation in this
 * header returns a pose whose heading is wrapped into (-pi, pi].
 */
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  static Pose identity() { return {}; }
  Eigen::Matrix3d matrix() const;
  static Pose from_matrix(const Eigen::Matrix3d& m);
};

/// Body-frame twist (vx, vy, omega), the vee of g^-1 g'.
struct BodyVelocity {
  double vx = 0.0;
  double vy = 0.0;
  double omega = 0.0;

  Eigen::Vector3d vector() const { return {vx, vy, omega}; }
  static BodyVelocity from_vector(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }

  BodyVelocity& operator+=(const BodyVelocity& o);
  friend BodyVelocity operator+(BodyVelocity a, const BodyVelocity& b) { return a += b; }
  friend BodyVelocity operator-(const BodyVelocity& a, const BodyVelocity& b) {
    return {a.vx - b.vx, a.vy - b.vy, a.omega - b.omega};
  }
  friend BodyVelocity operator*(double s, const BodyVelocity& v) {
    return {s * v.vx, s * v.vy, s * v.omega};
  }
  friend BodyVelocity operator-(const BodyVelocity& v) { return {-v.vx, -v.vy, -v.omega}; }
};

Pose compose(const Pose& a, const Pose& b);
Pose inverse(const Pose& g);

/// Element of g1^-1 g2 with the heading difference wrapped.
Pose relative(const Pose& from, const Pose& to);

Eigen::Matrix3d hat(const Eigen::Vector3d& v);

/// Inverse of hat. Throws InvalidArgument if the matrix is not in se(2)
/// (non-zero bottom row or non-skew rotation block) beyond 1e-12.
Eigen::Vector3d vee(const Eigen::Matrix3d& m);

/// Closed-form group exponential of a twist (already scaled by time).
Pose exp_map(const BodyVelocity& twist);
BodyVelocity log_map(const Pose& g);

enum class StepMethod { euler, exp };

/// Advance a pose by body velocity xi held for dt.
Pose step_pose(const Pose& g, const BodyVelocity& xi, double dt, StepMethod method);

/// Integrate a body-velocity series from g0; result has xi.size() + 1 poses.
std::vector<Pose> integrate_poses(const Pose& g0, std::span<const BodyVelocity> xi, double dt,
                                  StepMethod method);

/**
 * @brief Body velocities xi = (g^-1 g')^vee recovered from sampled poses.
 *
 * Interior samples use central differences pulled back into the body frame of
 * the sample; the two endpoints use second-order one-sided stencils. Requires
 * at least three samples at uniform spacing dt.
 */
std::vector<BodyVelocity> body_velocity_from_poses(std::span<const Pose> poses, double dt);

}  // namespace gaitid

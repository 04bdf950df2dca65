#include "gaitid/se2.hpp"

#include <cmath>
#include <numbers>

#include "gaitid/error.hpp"

namespace gaitid {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// sin(w)/w and (1 - cos(w))/w with series fallbacks near zero.
void exp_coefficients(double w, double& s_over_w, double& c_over_w) {
  if (std::abs(w) < 1e-4) {
    const double w2 = w * w;
    s_over_w = 1.0 - w2 / 6.0 + w2 * w2 / 120.0;
    c_over_w = w / 2.0 - w * w2 / 24.0 + w * w2 * w2 / 720.0;
  } else {
    s_over_w = std::sin(w) / w;
    c_over_w = (1.0 - std::cos(w)) / w;
  }
}

}  // namespace

double wrap_angle(double theta) {
  double r = std::remainder(theta, kTwoPi);
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}

Eigen::Matrix3d Pose::matrix() const {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix3d m;
  m << c, -s, x, s, c, y, 0.0, 0.0, 1.0;
  return m;
}

Pose Pose::from_matrix(const Eigen::Matrix3d& m) {
  return {m(0, 2), m(1, 2), wrap_angle(std::atan2(m(1, 0), m(0, 0)))};
}

BodyVelocity& BodyVelocity::operator+=(const BodyVelocity& o) {
  vx += o.vx;
  vy += o.vy;
  omega += o.omega;
  return *this;
}

Pose compose(const Pose& a, const Pose& b) {
  const double c = std::cos(a.theta);
  const double s = std::sin(a.theta);
  return {a.x + c * b.x - s * b.y, a.y + s * b.x + c * b.y, wrap_angle(a.theta + b.theta)};
}

Pose inverse(const Pose& g) {
  const double c = std::cos(g.theta);
  const double s = std::sin(g.theta);
  return {-(c * g.x + s * g.y), -(-s * g.x + c * g.y), wrap_angle(-g.theta)};
}

Pose relative(const Pose& from, const Pose& to) { return compose(inverse(from), to); }

Eigen::Matrix3d hat(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v[2], v[0], v[2], 0.0, v[1], 0.0, 0.0, 0.0;
  return m;
}

Eigen::Vector3d vee(const Eigen::Matrix3d& m) {
  constexpr double tol = 1e-12;
  const bool bottom_zero =
      std::abs(m(2, 0)) <= tol && std::abs(m(2, 1)) <= tol && std::abs(m(2, 2)) <= tol;
  const bool skew = std::abs(m(0, 0)) <= tol && std::abs(m(1, 1)) <= tol &&
                    std::abs(m(0, 1) + m(1, 0)) <= tol;
  if (!bottom_zero || !skew) {
    throw InvalidArgument("vee: matrix is not an element of se(2)");
  }
  return {m(0, 2), m(1, 2), m(1, 0)};
}

Pose exp_map(const BodyVelocity& twist) {
  double a = 0.0;
  double b = 0.0;
  exp_coefficients(twist.omega, a, b);
  return {a * twist.vx - b * twist.vy, b * twist.vx + a * twist.vy, wrap_angle(twist.omega)};
}

BodyVelocity log_map(const Pose& g) {
  const double w = g.theta;
  double a = 0.0;
  double b = 0.0;
  exp_coefficients(w, a, b);
  // Inverse of V = [[a, -b], [b, a]].
  const double det = a * a + b * b;
  return {(a * g.x + b * g.y) / det, (-b * g.x + a * g.y) / det, w};
}

Pose step_pose(const Pose& g, const BodyVelocity& xi, double dt, StepMethod method) {
  if (method == StepMethod::exp) return compose(g, exp_map(dt * xi));
  const double c = std::cos(g.theta);
  const double s = std::sin(g.theta);
  return {g.x + dt * (c * xi.vx - s * xi.vy), g.y + dt * (s * xi.vx + c * xi.vy),
          wrap_angle(g.theta + dt * xi.omega)};
}

std::vector<Pose> integrate_poses(const Pose& g0, std::span<const BodyVelocity> xi, double dt,
                                  StepMethod method) {
  std::vector<Pose> out;
  out.reserve(xi.size() + 1);
  out.push_back(g0);
  for (const auto& v : xi) out.push_back(step_pose(out.back(), v, dt, method));
  return out;
}

std::vector<BodyVelocity> body_velocity_from_poses(std::span<const Pose> poses, double dt) {
  const size_t n = poses.size();
  if (n < 3) throw InvalidArgument("body_velocity_from_poses: need at least 3 samples");
  if (!(dt > 0.0)) throw InvalidArgument("body_velocity_from_poses: dt must be positive");

  // Pull a world-frame displacement rate back into the body frame at sample i.
  auto pull_back = [&](size_t i, double dx, double dy, double dtheta) {
    const double c = std::cos(poses[i].theta);
    const double s = std::sin(poses[i].theta);
    return BodyVelocity{(c * dx + s * dy) / (2.0 * dt), (-s * dx + c * dy) / (2.0 * dt),
                        dtheta / (2.0 * dt)};
  };
  auto dth = [&](size_t i, size_t j) { return wrap_angle(poses[j].theta - poses[i].theta); };

  std::vector<BodyVelocity> xi(n);
  for (size_t i = 1; i + 1 < n; ++i) {
    xi[i] = pull_back(i, poses[i + 1].x - poses[i - 1].x, poses[i + 1].y - poses[i - 1].y,
                      dth(i - 1, i + 1));
  }
  xi[0] = pull_back(0, -3.0 * poses[0].x + 4.0 * poses[1].x - poses[2].x,
                    -3.0 * poses[0].y + 4.0 * poses[1].y - poses[2].y,
                    4.0 * dth(0, 1) - dth(0, 2));
  const size_t e = n - 1;
  xi[e] = pull_back(e, 3.0 * poses[e].x - 4.0 * poses[e - 1].x + poses[e - 2].x,
                    3.0 * poses[e].y - 4.0 * poses[e - 1].y + poses[e - 2].y,
                    4.0 * dth(e - 1, e) - dth(e - 2, e));
  return xi;
}

}  // namespace gaitid

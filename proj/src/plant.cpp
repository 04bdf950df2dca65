#include "gaitid/plant.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/LU>

#include "gaitid/error.hpp"

namespace gaitid {

namespace {

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

Eigen::Vector2d perp(const Eigen::Vector2d& v) { return {-v.y(), v.x()}; }

// Wrench of a straight link whose material points are p(s) = p0 + s p1 with
// velocity v(s) = v0 + s v1 for s in [0, L]; drag tensor k (constant along it).
Eigen::Vector3d link_wrench(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                            const Eigen::Vector2d& v0, const Eigen::Vector2d& v1,
                            const Eigen::Matrix2d& k, double len) {
  const double l2 = len * len / 2.0;
  const double l3 = len * len * len / 3.0;
  const Eigen::Vector2d kv0 = k * v0;
  const Eigen::Vector2d kv1 = k * v1;
  const Eigen::Vector2d f = -(len * kv0 + l2 * kv1);
  const double tau =
      -(len * cross2(p0, kv0) + l2 * (cross2(p0, kv1) + cross2(p1, kv0)) + l3 * cross2(p1, kv1));
  return {f.x(), f.y(), tau};
}

Eigen::Matrix2d drag_tensor(const Eigen::Vector2d& tangent, const SwimmerConfig& cfg) {
  const double ct = cfg.longitudinal_drag;
  const double cn = cfg.drag_ratio * ct;
  const Eigen::Vector2d n = perp(tangent);
  return ct * tangent * tangent.transpose() + cn * n * n.transpose();
}

}  // namespace

void SwimmerConfig::validate() const {
  if (!(link_length > 0.0)) throw InvalidArgument("swimmer: link_length must be positive");
  if (!(drag_ratio > 1.0)) throw InvalidArgument("swimmer: drag_ratio must exceed 1");
  if (!(longitudinal_drag > 0.0)) throw InvalidArgument("swimmer: longitudinal_drag must be positive");
  if (!((rate.array() > 0.0).all())) throw InvalidArgument("swimmer: rate constants must be positive");
  if (!(joint_limit > 0.0)) throw InvalidArgument("swimmer: joint_limit must be positive");
  if (!(input_min < input_max)) throw InvalidArgument("swimmer: input range is empty");
  for (double T : {input_min, input_max}) {
    if ((steady_state(T).array().abs() > joint_limit + 1e-12).any()) {
      throw InvalidArgument("swimmer: steady state of an admissible input exceeds the joint limits");
    }
  }
}

LinkWrenches swimmer_wrenches(const Eigen::Vector2d& r, const Eigen::Vector2d& r_dot,
                              const Eigen::Vector3d& xi, const SwimmerConfig& cfg) {
  const double len = cfg.link_length;
  const Eigen::Vector2d v_body(xi[0], xi[1]);
  const double w = xi[2];
  auto rigid = [&](const Eigen::Vector2d& p) -> Eigen::Vector2d { return v_body + w * perp(p); };

  LinkWrenches out;
  // Head link, hinged at the front of the middle link.
  {
    const Eigen::Vector2d j(len / 2.0, 0.0);
    const Eigen::Vector2d t(std::cos(r[0]), std::sin(r[0]));
    out.links[0] = link_wrench(j, t, rigid(j), w * perp(t) + r_dot[0] * perp(t),
                               drag_tensor(t, cfg), len);
  }
  // Middle link.
  {
    const Eigen::Vector2d p0(-len / 2.0, 0.0);
    const Eigen::Vector2d t(1.0, 0.0);
    out.links[1] = link_wrench(p0, t, rigid(p0), w * perp(t), drag_tensor(t, cfg), len);
  }
  // Tail link, extending backward from the rear hinge; its heading is -r2.
  {
    const Eigen::Vector2d j(-len / 2.0, 0.0);
    const Eigen::Vector2d t(std::cos(-r[1]), std::sin(-r[1]));
    out.links[2] = link_wrench(j, -t, rigid(j), w * perp(-t) + r_dot[1] * perp(t),
                               drag_tensor(t, cfg), len);
  }
  return out;
}

Eigen::Matrix<double, 3, 2> local_connection(const Eigen::Vector2d& r, const SwimmerConfig& cfg) {
  Eigen::Matrix3d omega_xi;
  Eigen::Matrix<double, 3, 2> omega_r;
  for (int c = 0; c < 3; ++c) {
    omega_xi.col(c) =
        swimmer_wrenches(r, Eigen::Vector2d::Zero(), Eigen::Vector3d::Unit(c), cfg).total();
  }
  for (int c = 0; c < 2; ++c) {
    omega_r.col(c) =
        swimmer_wrenches(r, Eigen::Vector2d::Unit(c), Eigen::Vector3d::Zero(), cfg).total();
  }
  Eigen::FullPivLU<Eigen::Matrix3d> lu(omega_xi);
  if (lu.rcond() < 1e-12) {
    throw NumericalError("local_connection", "viscous drag system is singular");
  }
  return lu.solve(omega_r);
}

Eigen::Vector2d actuator_rhs(const Eigen::Vector2d& r, double T, const SwimmerConfig& cfg) {
  return cfg.rate.cwiseProduct(cfg.steady_state(T) - r);
}

void SurrogateConfig::validate() const {
  geometry.validate();
  if (!((rate_swell.array() > 0.0).all() && (rate_shrink.array() > 0.0).all())) {
    throw InvalidArgument("surrogate: rates must be positive");
  }
  if (!(volume_min < volume_max)) throw InvalidArgument("surrogate: empty volume range");
  if (!(input_min < input_max)) throw InvalidArgument("surrogate: input range is empty");
  for (double T : {input_min, input_max}) {
    const Eigen::Vector2d s = steady_state(T);
    if ((s.array() < volume_min).any() || (s.array() > volume_max).any()) {
      throw InvalidArgument("surrogate: steady state of an admissible input leaves the volume limits");
    }
    if (((gain * (s.array() - reference)).abs() > geometry.joint_limit + 1e-12).any()) {
      throw InvalidArgument("surrogate: effective bending exceeds the geometry joint limit");
    }
  }
}

Eigen::Vector2d surrogate_rhs(const Eigen::Vector2d& r, double T, const SurrogateConfig& cfg) {
  const Eigen::Vector2d target = cfg.steady_state(T);
  Eigen::Vector2d out;
  for (int i = 0; i < 2; ++i) {
    const double c = target[i] > r[i] ? cfg.rate_swell[i] : cfg.rate_shrink[i];
    out[i] = c * (target[i] - r[i]);
  }
  return out;
}

Eigen::Matrix<double, 3, 2> surrogate_connection(const Eigen::Vector2d& r,
                                                 const SurrogateConfig& cfg) {
  const Eigen::Vector2d q = cfg.gain * (r.array() - cfg.reference).matrix();
  return local_connection(q, cfg.geometry) * cfg.gain;
}

SwimmerPlant::SwimmerPlant(SwimmerConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

Eigen::VectorXd SwimmerPlant::shape_rate(const Eigen::VectorXd& r, double u) const {
  return actuator_rhs(r, u, cfg_);
}

ConnectionMatrix SwimmerPlant::connection(const Eigen::VectorXd& r) const {
  return local_connection(r, cfg_);
}

Eigen::VectorXd SwimmerPlant::steady_state(double u) const { return cfg_.steady_state(u); }

void SwimmerPlant::check_limits(const Eigen::VectorXd& r, double t) const {
  if ((r.array().abs() > cfg_.joint_limit + 1e-9).any() || !r.allFinite()) {
    std::ostringstream os;
    os << "joint limit " << cfg_.joint_limit << " violated at t=" << t << " (r = "
       << r.transpose() << ")";
    throw NumericalError("simulate", os.str());
  }
}

SurrogatePlant::SurrogatePlant(SurrogateConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

Eigen::VectorXd SurrogatePlant::shape_rate(const Eigen::VectorXd& r, double u) const {
  return surrogate_rhs(r, u, cfg_);
}

ConnectionMatrix SurrogatePlant::connection(const Eigen::VectorXd& r) const {
  return surrogate_connection(r, cfg_);
}

Eigen::VectorXd SurrogatePlant::steady_state(double u) const { return cfg_.steady_state(u); }

void SurrogatePlant::check_limits(const Eigen::VectorXd& r, double t) const {
  if ((r.array() < cfg_.volume_min - 1e-9).any() || (r.array() > cfg_.volume_max + 1e-9).any() ||
      !r.allFinite()) {
    std::ostringstream os;
    os << "volume limits violated at t=" << t << " (r = " << r.transpose() << ")";
    throw NumericalError("simulate", os.str());
  }
}

Trajectory simulate(const Plant& plant, const std::function<double(double)>& input,
                    std::size_t samples, double dt, const Pose& g0,
                    const std::optional<Eigen::VectorXd>& r0, double t0) {
  if (!(dt > 0.0)) throw InvalidArgument("simulate: dt must be positive");
  if (samples < 2) throw InvalidArgument("simulate: need at least two samples");
  const int n = plant.shape_dim();

  Trajectory tr;
  tr.dt = dt;
  tr.t.resize(samples);
  tr.u.resize(samples);
  tr.r.resize(static_cast<Eigen::Index>(samples), n);
  tr.r_dot.resize(static_cast<Eigen::Index>(samples), n);
  tr.xi.resize(samples);
  tr.g.resize(samples);

  Eigen::VectorXd r = r0 ? *r0 : plant.steady_state(input(t0));
  if (r.size() != n) throw InvalidArgument("simulate: initial shape has the wrong dimension");
  plant.check_limits(r, t0);
  Pose g = g0;
  double u_now = input(t0);
  Eigen::VectorXd k1 = plant.shape_rate(r, u_now);

  for (std::size_t i = 0; i < samples; ++i) {
    const double t = t0 + static_cast<double>(i) * dt;
    const auto row = static_cast<Eigen::Index>(i);
    tr.t[i] = t;
    tr.u[i] = u_now;
    tr.r.row(row) = r.transpose();
    tr.r_dot.row(row) = k1.transpose();
    tr.xi[i] = BodyVelocity::from_vector(-plant.connection(r) * k1);
    tr.g[i] = g;
    if (!std::isfinite(u_now)) throw InvalidArgument("simulate: non-finite input");
    if (i + 1 == samples) break;

    const double u_mid = input(t + 0.5 * dt);
    const double u_next = input(t + dt);
    const Eigen::VectorXd k2 = plant.shape_rate(r + 0.5 * dt * k1, u_mid);
    const Eigen::VectorXd k3 = plant.shape_rate(r + 0.5 * dt * k2, u_mid);
    const Eigen::VectorXd k4 = plant.shape_rate(r + dt * k3, u_next);
    const Eigen::VectorXd r_next = r + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    plant.check_limits(r_next, t + dt);
    const Eigen::VectorXd f_next = plant.shape_rate(r_next, u_next);

    // Exponential midpoint rule on SE(2) with a Hermite midpoint shape.
    const Eigen::VectorXd r_mid = 0.5 * (r + r_next) + dt / 8.0 * (k1 - f_next);
    const Eigen::VectorXd rdot_mid = plant.shape_rate(r_mid, u_mid);
    const BodyVelocity xi_mid = BodyVelocity::from_vector(-plant.connection(r_mid) * rdot_mid);
    g = step_pose(g, xi_mid, dt, StepMethod::exp);

    r = r_next;
    k1 = f_next;
    u_now = u_next;
  }
  return tr;
}

Trajectory simulate(const Plant& plant, std::span<const double> u, double dt, const Pose& g0,
                    const std::optional<Eigen::VectorXd>& r0) {
  if (u.size() < 2) throw InvalidArgument("simulate: need at least two input samples");
  const std::vector<double> samples(u.begin(), u.end());
  auto input = [&samples, dt](double t) {
    const double x = t / dt;
    if (x <= 0.0) return samples.front();
    const auto i = static_cast<std::size_t>(std::floor(x));
    if (i + 1 >= samples.size()) return samples.back();
    const double w = x - static_cast<double>(i);
    return samples[i] + w * (samples[i + 1] - samples[i]);
  };
  return simulate(plant, input, samples.size(), dt, g0, r0, 0.0);
}

double loop_area(const Eigen::MatrixXd& r2) {
  const Eigen::Index n = r2.rows();
  double a = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index j = (i + 1) % n;
    a += r2(i, 0) * r2(j, 1) - r2(j, 0) * r2(i, 1);
  }
  return 0.5 * a;
}

}  // namespace gaitid

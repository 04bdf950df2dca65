#include "gaitid/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gaitid/error.hpp"
#include "gaitid/prediction.hpp"

namespace gaitid {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t samples_per_cycle(double tc, const ObjectiveOptions& opts) {
  if (opts.samples_per_cycle > 0) return static_cast<std::size_t>(opts.samples_per_cycle);
  if (!(opts.dt > 0.0)) throw InvalidArgument("objective: dt must be positive");
  return static_cast<std::size_t>(std::ceil(tc / opts.dt - 1e-9));
}

Eigen::VectorXd clip(const Eigen::VectorXd& z) { return z.cwiseMax(0.0).cwiseMin(1.0); }

}  // namespace

ObjectiveValue objective_eval(const GaitModel& model, const CycleParams& p,
                              const ObjectiveOptions& opts) {
  validate(p);
  const double tc = period(p);
  const std::size_t per = samples_per_cycle(tc, opts);
  const double h = tc / static_cast<double>(per);
  const auto cycles = static_cast<std::size_t>(opts.warmup_cycles) + 1;
  const InputSchedule s = InputSchedule::repeat(p, cycles);
  const std::size_t n = cycles * per + 1;
  std::vector<double> t(n), u(n), phi(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = static_cast<double>(i) * h;
    u[i] = s.value(t[i]);
    phi[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(per);
  }
  const Prediction pr = predict(model, t, u, phi, h);
  ObjectiveValue v;
  v.dx = relative(pr.g_hat[(cycles - 1) * per], pr.g_hat[cycles * per]).x;
  v.t_cycle = tc;
  v.F = v.dx - opts.lambda * tc;
  return v;
}

ObjectiveValue verify_on_plant(const Plant& plant, const CycleParams& p,
                               const ObjectiveOptions& opts) {
  const double tc = period(p);
  const std::size_t per = samples_per_cycle(tc, opts);
  const CycleDisplacement d =
      plant_cycle_displacement(plant, p, tc / static_cast<double>(per), opts.warmup_cycles);
  ObjectiveValue v;
  v.dx = d.delta.x;
  v.t_cycle = tc;
  v.F = v.dx - opts.lambda * tc;
  return v;
}

Eigen::VectorXd fd_gradient(const ScalarFunction& f, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& h, const Eigen::VectorXd& lo,
                            const Eigen::VectorXd& hi, std::optional<double> fx) {
  const Eigen::Index d = x.size();
  if (h.size() != d || lo.size() != d || hi.size() != d) {
    throw InvalidArgument("fd_gradient: dimension mismatch");
  }
  auto eval = [&f](const Eigen::VectorXd& p) {
    const double v = f(p);
    if (!std::isfinite(v)) throw NumericalError("fd_gradient", "non-finite function value");
    return v;
  };
  Eigen::VectorXd g(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double hi_step = h[i];
    if (!(hi_step > 0.0)) throw InvalidArgument("fd_gradient: steps must be positive");
    Eigen::VectorXd a = x;
    Eigen::VectorXd b = x;
    if (x[i] - hi_step >= lo[i] && x[i] + hi_step <= hi[i]) {
      a[i] += hi_step;
      b[i] -= hi_step;
      g[i] = (eval(a) - eval(b)) / (2.0 * hi_step);
      continue;
    }
    const double f0 = fx ? *fx : eval(x);
    const double dir = x[i] + hi_step <= hi[i] ? 1.0 : -1.0;
    if ((dir > 0.0 && x[i] + 2.0 * hi_step > hi[i]) || (dir < 0.0 && x[i] - 2.0 * hi_step < lo[i])) {
      throw InvalidArgument("fd_gradient: box narrower than two steps");
    }
    a[i] += dir * hi_step;
    b[i] += dir * 2.0 * hi_step;
    g[i] = dir * (-3.0 * f0 + 4.0 * eval(a) - eval(b)) / (2.0 * hi_step);
  }
  return g;
}

Eigen::VectorXd fd_gradient(const ScalarFunction& f, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& h) {
  const Eigen::VectorXd inf =
      Eigen::VectorXd::Constant(x.size(), std::numeric_limits<double>::infinity());
  return fd_gradient(f, x, h, -inf, inf);
}

OptimizeResult optimize_box(const ScalarFunction& f, const Eigen::VectorXd& lo,
                            const Eigen::VectorXd& hi, const Eigen::VectorXd& x0,
                            const OptimizeOptions& opts) {
  const Eigen::Index d = x0.size();
  if (lo.size() != d || hi.size() != d) throw InvalidArgument("optimize_box: dimension mismatch");
  if (!((hi - lo).array() > 0.0).all()) throw InvalidArgument("optimize_box: empty box");
  if (!((x0.array() >= lo.array()) && (x0.array() <= hi.array())).all()) {
    throw InvalidArgument("optimize_box: start point outside the box");
  }
  const Eigen::VectorXd width = hi - lo;

  OptimizeResult res;
  auto to_x = [&](const Eigen::VectorXd& z) -> Eigen::VectorXd {
    Eigen::VectorXd x = lo + z.cwiseProduct(width);
    return x.cwiseMax(lo).cwiseMin(hi);
  };
  auto fz = [&](const Eigen::VectorXd& z) {
    ++res.evaluations;
    const double v = f(to_x(z));
    if (!std::isfinite(v)) throw NumericalError("optimize_box", "non-finite objective");
    return v;
  };
  const Eigen::VectorXd hvec = Eigen::VectorXd::Constant(d, opts.h);
  const Eigen::VectorXd zlo = Eigen::VectorXd::Zero(d);
  const Eigen::VectorXd zhi = Eigen::VectorXd::Ones(d);

  Eigen::VectorXd z = clip((x0 - lo).cwiseQuotient(width));
  double fcur = fz(z);
  res.f0 = fcur;
  Eigen::VectorXd g = fd_gradient(fz, z, hvec, zlo, zhi, fcur);

  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(d, d);
  bool h_scaled = false;
  res.status = "iteration limit";

  for (int it = 0; it < opts.max_iterations; ++it) {
    Eigen::VectorXd pg = g;
    for (Eigen::Index i = 0; i < d; ++i) {
      if ((z[i] <= 0.0 && g[i] < 0.0) || (z[i] >= 1.0 && g[i] > 0.0)) pg[i] = 0.0;
    }
    if (pg.lpNorm<Eigen::Infinity>() <= 1e-10 * (1.0 + std::abs(fcur))) {
      res.converged = true;
      res.status = "stationary";
      break;
    }
    if (!h_scaled) H = Eigen::MatrixXd::Identity(d, d) * (0.1 / pg.lpNorm<Eigen::Infinity>());

    bool accepted = false;
    Eigen::VectorXd zn;
    double fn = fcur;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      Eigen::VectorXd dir = H * pg;
      for (Eigen::Index i = 0; i < d; ++i) {
        if (pg[i] == 0.0) dir[i] = 0.0;
      }
      if (dir.dot(pg) <= 0.0) {
        H = Eigen::MatrixXd::Identity(d, d) * (0.1 / pg.lpNorm<Eigen::Infinity>());
        h_scaled = false;
        dir = H * pg;
      }
      double alpha = 1.0;
      for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
        zn = clip(z + alpha * dir);
        if ((zn - z).lpNorm<Eigen::Infinity>() < opts.step_tol) break;
        fn = fz(zn);
        if (fn >= fcur + 1e-4 * pg.dot(zn - z) && fn >= fcur) {
          accepted = true;
          break;
        }
      }
      if (!accepted && h_scaled) {
        // Curvature model failed; retry along the scaled gradient.
        H = Eigen::MatrixXd::Identity(d, d) * (0.1 / pg.lpNorm<Eigen::Infinity>());
        h_scaled = false;
      } else {
        break;
      }
    }
    if (!accepted) {
      res.converged = true;
      res.status = "step below tolerance";
      break;
    }

    const Eigen::VectorXd s = zn - z;
    const Eigen::VectorXd gn = fd_gradient(fz, zn, hvec, zlo, zhi, fn);
    z = zn;
    fcur = fn;
    ++res.iterations;
    res.trace.push_back(fcur);

    // BFGS on -f.
    const Eigen::VectorXd y = -(gn - g);
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (!h_scaled) {
        H = Eigen::MatrixXd::Identity(d, d) * (sy / y.dot(y));
        h_scaled = true;
      }
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
      H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) +
          rho * s * s.transpose();
    }
    g = gn;
    if (s.lpNorm<Eigen::Infinity>() < opts.step_tol) {
      res.converged = true;
      res.status = "step below tolerance";
      break;
    }
  }
  res.x = to_x(z);
  res.f = fcur;
  return res;
}

OptimizeResult optimize_box(const ScalarFunction& f, const ParamBox& box, const Eigen::VectorXd& x0,
                            const OptimizeOptions& opts) {
  box.validate();
  return optimize_box(f, box.lo, box.hi, x0, opts);
}

std::vector<double> cycle_displacements(const Experiment& ex) {
  const Trajectory& tr = ex.trajectory;
  const InputSchedule& s = ex.schedule;
  std::vector<double> out;
  std::vector<std::size_t> first(s.cycle_count(), tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const std::size_t k = s.cycle_at(tr.t[i]);
    first[k] = std::min(first[k], i);
  }
  for (std::size_t k = 0; k < s.cycle_count(); ++k) {
    const std::size_t b = first[k];
    const std::size_t e = k + 1 < s.cycle_count() ? first[k + 1] : tr.size() - 1;
    if (b >= tr.size() || e >= tr.size() || e <= b) continue;
    out.push_back(relative(tr.g[b], tr.g[e]).x);
  }
  return out;
}

double typical_speed(const Experiment& ex) {
  const std::vector<double> dx = cycle_displacements(ex);
  const std::vector<double>& dur = ex.schedule.durations();
  double acc = 0.0;
  for (std::size_t k = 0; k < dx.size(); ++k) acc += std::abs(dx[k]) / dur[k];
  return dx.empty() ? 0.0 : acc / static_cast<double>(dx.size());
}

OptimizationHistory iterate_refine(const Plant& plant, const ParamBox& full_box,
                                   const IterateConfig& cfg,
                                   const IterationCallback& on_iteration) {
  full_box.validate();
  if (cfg.n_iters == 0) throw InvalidArgument("iterate_refine: n_iters must be positive");
  if (!(cfg.retained_width > 0.0 && cfg.retained_width <= 1.0)) {
    throw InvalidArgument("iterate_refine: retained_width must be in (0, 1]");
  }
  OptimizationHistory hist;
  hist.config = cfg;
  hist.lambda_auto = !cfg.lambda.has_value();
  hist.lambda = cfg.lambda.value_or(0.0);

  const WaveFamily fam = full_box.family;
  ObjectiveOptions oopts;
  oopts.dt = cfg.dt;
  oopts.warmup_cycles = cfg.objective_warmup_cycles;
  // One sampling step for every cycle length keeps the objective smooth in t_cycle.
  const double longest = period(from_vector(fam, full_box.full_hi));
  oopts.samples_per_cycle = static_cast<int>(std::ceil(longest / cfg.dt - 1e-9));

  ParamBox box = full_box;
  std::optional<CycleParams> incumbent;
  ObjectiveValue incumbent_value;

  for (std::size_t it = 0; it < cfg.n_iters; ++it) {
    IterationRecord rec;
    rec.iteration = it + 1;
    rec.box = box;
    rec.sample_seed = derive_seed(cfg.seed, "sample", it);
    rec.cv_seed = derive_seed(cfg.seed, "folds", it);
    rec.samples = sample_params(box, cfg.n_samples, rec.sample_seed);

    const CycleParams center = from_vector(fam, box.center());
    const Experiment ex =
        run_experiment(plant, rec.samples, cfg.dt, center, cfg.experiment_warmup_cycles);
    const std::vector<double> dx = cycle_displacements(ex);
    for (double v : dx) rec.mean_sample_dx += v / static_cast<double>(dx.size());
    if (it == 0 && hist.lambda_auto) hist.lambda = cfg.lambda_scale * typical_speed(ex);
    oopts.lambda = hist.lambda;

    const PreparedData data = preprocess(ex, cfg.pipeline);
    rec.cv = cross_validate(data, cfg.pipeline, rec.cv_seed);
    const GaitModel model = fit_gait_model(data, cfg.pipeline);
    rec.model_json = model.to_json();

    rec.start = incumbent ? to_vector(*incumbent) : box.center();
    rec.start = rec.start.cwiseMax(box.lo).cwiseMin(box.hi);
    const ScalarFunction f = [&](const Eigen::VectorXd& x) {
      return objective_eval(model, from_vector(fam, x), oopts).F;
    };
    rec.search = optimize_box(f, box, rec.start, cfg.optimizer);
    rec.optimum = from_vector(fam, rec.search.x);
    rec.predicted = objective_eval(model, rec.optimum, oopts);
    rec.verified = verify_on_plant(plant, rec.optimum, oopts);

    if (!incumbent || rec.verified.F >= incumbent_value.F) {
      incumbent = rec.optimum;
      incumbent_value = rec.verified;
    } else {
      // Re-score the incumbent under the current lambda (unchanged after iteration 1).
      incumbent_value = verify_on_plant(plant, *incumbent, oopts);
    }
    rec.incumbent = *incumbent;
    rec.incumbent_verified = incumbent_value;

    box = shrink_box(box, *incumbent, 1.0 - cfg.retained_width);
    if (on_iteration) on_iteration(rec);
    hist.iterations.push_back(std::move(rec));
  }
  return hist;
}

}  // namespace gaitid

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gaitid/gait_model.hpp"
#include "gaitid/pipeline.hpp"
#include "gaitid/plant.hpp"
#include "gaitid/waveform.hpp"

namespace gaitid {

/// F = dx - lambda * t_cycle for one cycle.
struct ObjectiveValue {
  double F = 0.0;
  double dx = 0.0;
  double t_cycle = 0.0;
};

struct ObjectiveOptions {
  double lambda = 0.0;
  double dt = 0.01;
  /// Cycles predicted before the measured one.
  int warmup_cycles = 1;
  /// Fixed samples per cycle; 0 derives them from dt.
  int samples_per_cycle = 0;
};

/**
 * Model-predicted objective: the cycle is repeated warmup_cycles + 1 times,
 * the predictor runs on clock phase from the limit cycle, and dx is the x
 * displacement over the last cycle in the pose frame at its start.
 */
ObjectiveValue objective_eval(const GaitModel& model, const CycleParams& p,
                              const ObjectiveOptions& opts);

/// Same objective measured on the plant.
ObjectiveValue verify_on_plant(const Plant& plant, const CycleParams& p,
                               const ObjectiveOptions& opts);

using ScalarFunction = std::function<double(const Eigen::VectorXd&)>;

/**
 * Finite-difference gradient. Central differences where x +- h stays inside
 * [lo, hi]; otherwise a second-order one-sided stencil pointing into the box.
 * Throws NumericalError on a non-finite function value.
 */
Eigen::VectorXd fd_gradient(const ScalarFunction& f, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& h, const Eigen::VectorXd& lo,
                            const Eigen::VectorXd& hi, std::optional<double> fx = std::nullopt);
/// Unbounded variant (central differences everywhere).
Eigen::VectorXd fd_gradient(const ScalarFunction& f, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& h);

struct OptimizeOptions {
  double h = 1e-3;          // finite-difference step, normalized units
  double step_tol = 1e-6;   // normalized
  int max_iterations = 200;
};

struct OptimizeResult {
  Eigen::VectorXd x;
  double f = 0.0;
  double f0 = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::string status;
  std::vector<double> trace;  // best F after each iteration
};

/**
 * Box-constrained maximization in box-normalized coordinates: projected
 * quasi-Newton (BFGS) steps with finite-difference gradients and a projected
 * backtracking line search. Every evaluated point lies in [lo, hi]; the result
 * never scores below x0.
 */
OptimizeResult optimize_box(const ScalarFunction& f, const Eigen::VectorXd& lo,
                            const Eigen::VectorXd& hi, const Eigen::VectorXd& x0,
                            const OptimizeOptions& opts = {});
OptimizeResult optimize_box(const ScalarFunction& f, const ParamBox& box, const Eigen::VectorXd& x0,
                            const OptimizeOptions& opts = {});

struct IterateConfig {
  std::size_t n_iters = 3;
  std::size_t n_samples = 100;
  double retained_width = 0.65;  // new box width / old box width
  std::optional<double> lambda;  // auto-scaled from iteration-1 samples when unset
  double lambda_scale = 0.1;
  double dt = 0.01;
  int experiment_warmup_cycles = 2;
  int objective_warmup_cycles = 1;
  std::uint64_t seed = 1;
  PipelineConfig pipeline;
  OptimizeOptions optimizer;
};

struct IterationRecord {
  std::size_t iteration = 0;
  ParamBox box;
  std::uint64_t sample_seed = 0;
  std::uint64_t cv_seed = 0;
  std::vector<CycleParams> samples;
  double mean_sample_dx = 0.0;  // plant, over sampled cycles
  Eigen::VectorXd start;
  OptimizeResult search;
  CycleParams optimum;
  ObjectiveValue predicted;
  ObjectiveValue verified;
  /// Best plant-verified point found so far (this and earlier iterations).
  CycleParams incumbent;
  ObjectiveValue incumbent_verified;
  CrossValidation cv;
  std::string model_json;
};

struct OptimizationHistory {
  double lambda = 0.0;
  bool lambda_auto = false;
  IterateConfig config;
  std::vector<IterationRecord> iterations;
};

/// Typical |dx| / t_cycle of a sampled record (one value per commanded cycle).
double typical_speed(const Experiment& ex);

/// Per-cycle x displacement of a record, in the pose frame at each cycle start.
std::vector<double> cycle_displacements(const Experiment& ex);

using IterationCallback = std::function<void(const IterationRecord&)>;

OptimizationHistory iterate_refine(const Plant& plant, const ParamBox& full_box,
                                   const IterateConfig& cfg,
                                   const IterationCallback& on_iteration = {});

}  // namespace gaitid

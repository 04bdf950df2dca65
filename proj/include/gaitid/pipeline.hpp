#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gaitid/gait_model.hpp"
#include "gaitid/phase.hpp"
#include "gaitid/plant.hpp"
#include "gaitid/waveform.hpp"

namespace gaitid {

/// Where shape and body velocities come from: filtered finite differences of
/// the recorded shapes and poses, or the plant's own recorded rates.
enum class DerivativeSource { differentiate, recorded };
/// Phase used for fitting: commanded clock phase or the corrected data phase
/// (aligned to the clock origin). Prediction always runs on clock phase.
enum class PhaseSource { clock, data };

std::string derivative_source_name(DerivativeSource s);
DerivativeSource derivative_source_from_name(const std::string& s);
std::string phase_source_name(PhaseSource s);
PhaseSource phase_source_from_name(const std::string& s);

struct PipelineConfig {
  double cutoff_factor = 10.0;  // filter cutoff in multiples of the mean forcing frequency
  int filter_order = 2;
  DerivativeSource derivative = DerivativeSource::differentiate;
  PhaseSource phase = PhaseSource::clock;
  PhaseCorrectionOptions phase_correction;
  GaitModelOptions model;
  int folds = 10;
};

/// Commanded schedule together with the simulated record.
struct Experiment {
  InputSchedule schedule;
  Trajectory trajectory;
};

/**
 * Simulate the plant over consecutive cycles sampled at dt. When warmup_cycles
 * is positive, the initial shape is the end state of that many cycles of
 * `warmup` started from steady state.
 */
Experiment run_experiment(const Plant& plant, std::vector<CycleParams> cycles, double dt,
                          const std::optional<CycleParams>& warmup = std::nullopt,
                          int warmup_cycles = 0);

/// Steady measurement of one repeated cycle: displacement over the last of
/// warmup_cycles + 1 cycles, expressed in the pose frame at its start.
struct CycleDisplacement {
  Pose delta;
  double t_cycle = 0.0;
};
CycleDisplacement plant_cycle_displacement(const Plant& plant, const CycleParams& p, double dt,
                                           int warmup_cycles);

/// Samples ready for regression.
struct PreparedData {
  double dt = 0.0;
  double cutoff = 0.0;  // 0 when no filtering was applied
  std::vector<double> t, u;
  std::vector<double> phi;        // phase used for fitting
  std::vector<double> phi_clock;  // commanded clock phase
  Eigen::MatrixXd r, r_dot, xi;   // xi: samples x 3
  std::vector<int> cycle;         // commanded cycle index of each sample
  std::size_t cycles = 0;
  double mean_phase_rate = 0.0;

  std::size_t size() const { return t.size(); }
};

PreparedData preprocess(const Experiment& ex, const PipelineConfig& cfg);

/// Fit on the samples whose cycle is flagged in `use_cycle` (all when empty).
GaitModel fit_gait_model(const PreparedData& data, const PipelineConfig& cfg,
                         const std::vector<bool>& use_cycle = {});

/// Samples of one held-out cycle.
struct CycleSlice {
  std::size_t begin = 0, end = 0;
};
std::vector<CycleSlice> cycle_slices(const PreparedData& data);

/// Error sums of first-order prediction and baseline over a set of held-out cycles.
struct HeldOutErrors {
  double r_dot_pred = 0.0, r_dot_base = 0.0;
  double xi_pred = 0.0, xi_base = 0.0;
  double xi_true_shapes = 0.0;  // body-velocity model fed the true shapes
  std::size_t samples = 0;

  double gamma_r_dot() const;
  double gamma_xi() const;
};

struct PhaseErrorRow {
  int fold = 0;
  int cycle = 0;
  double phi = 0.0;  // wrapped clock phase
  double r_dot_pred = 0.0, r_dot_base = 0.0, xi_pred = 0.0, xi_base = 0.0;
};

/// Predict each listed cycle from its first sample (shape on the limit cycle)
/// and accumulate errors; optionally append per-sample rows.
HeldOutErrors evaluate_cycles(const GaitModel& model, const PreparedData& data,
                              const std::vector<std::size_t>& cycles, int fold = 0,
                              std::vector<PhaseErrorRow>* rows = nullptr);

struct FoldResult {
  int fold = 0;
  std::vector<std::size_t> test_cycles;
  HeldOutErrors errors;
  double gamma_r_dot = 0.0, gamma_xi = 0.0;
};

struct CrossValidation {
  std::vector<FoldResult> folds;
  std::vector<PhaseErrorRow> phase_errors;
  double mean_gamma_r_dot = 0.0, std_gamma_r_dot = 0.0;
  double mean_gamma_xi = 0.0, std_gamma_xi = 0.0;
};

/// Cycle-level k-fold split: cycles shuffled with the seed, cycle i of the
/// shuffled order goes to fold i mod k.
std::vector<int> fold_assignment(std::size_t cycles, int folds, std::uint64_t seed);

CrossValidation cross_validate(const PreparedData& data, const PipelineConfig& cfg,
                               std::uint64_t seed);

/// Deterministic per-stage seed derived from one root seed.
std::uint64_t derive_seed(std::uint64_t root, const std::string& stage, std::uint64_t index = 0);

}  // namespace gaitid

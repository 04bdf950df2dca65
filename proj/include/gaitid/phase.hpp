#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "gaitid/signal.hpp"
#include "gaitid/waveform.hpp"

namespace gaitid {

/**
 * Raw oscillation angle of a shape record (one row per sample).
 *
 * Channels are centered and projected on their two leading principal axes;
 * each projection is scaled to unit variance and the planar angle of the
 * projected point is unwrapped. The sign is chosen so the angle winds forward.
 * Throws DegenerateOscillation when the second principal variance is below
 * 1e-6 of the first.
 */
std::vector<double> estimate_protophase(const Eigen::MatrixXd& r);

struct PhaseCorrectionOptions {
  int bins = 64;
  int order = 7;
};

/**
 * @brief Monotone map from protophase to a phase with uniform average rate.
 *
 * Built from the time spent in each protophase bin; the cumulative time map,
 * minus the identity, is smoothed by a Fourier series.
 */
class PhaseCorrection {
 public:
  PhaseCorrection() = default;
  explicit PhaseCorrection(FourierSeries residual) : residual_(std::move(residual)) {}
  double apply(double protophase) const;
  /// Minimum of d(phase)/d(protophase) over a fine grid.
  double min_slope() const;
  const FourierSeries& residual() const { return residual_; }

 private:
  FourierSeries residual_;
};

PhaseCorrection fit_phase_correction(std::span<const double> protophase, std::span<const double> t,
                                     const PhaseCorrectionOptions& opts = {});

/// Apply fit_phase_correction to the same record. Requires at least three
/// windings; throws NumericalError if the smoothed map is not monotone.
std::vector<double> correct_phase(std::span<const double> protophase, std::span<const double> t,
                                  const PhaseCorrectionOptions& opts = {});

/// Phase from a commanded schedule: 2 pi x elapsed fraction of each cycle.
std::vector<double> clock_phase(const InputSchedule& schedule, std::span<const double> t);
/// Same from per-cycle durations starting at t0.
std::vector<double> clock_phase(std::span<const double> durations, double t0,
                                std::span<const double> t);

/// Shift phase so its circular mean offset from reference is zero.
std::vector<double> align_phase_origin(std::span<const double> phase,
                                       std::span<const double> reference);

/// Number of whole turns between the first and last sample.
long winding_count(std::span<const double> phase);

/// Circular correlation coefficient (Fisher-Lee / Jammalamadaka form).
double circular_correlation(std::span<const double> a, std::span<const double> b);

/// Coefficient of variation of the finite-difference phase rate.
double phase_rate_cov(std::span<const double> phase, double dt);

/**
 * @brief Phase-averaged gait: Fourier models of shape and input versus phase.
 *
 * shape_rate is the analytic phase derivative of shape scaled by the mean
 * phase rate of the record.
 */
struct LimitCycle {
  FourierSeries shape;
  FourierSeries input;
  FourierSeries shape_rate;
  double mean_phase_rate = 0.0;

  int shape_dim() const { return static_cast<int>(shape.channels()); }
};

LimitCycle extract_limit_cycle(std::span<const double> phase, const Eigen::MatrixXd& r,
                               std::span<const double> u, int order, double mean_phase_rate);

}  // namespace gaitid

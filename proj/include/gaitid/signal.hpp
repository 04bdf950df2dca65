#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace gaitid {

/**
 * @brief Real Fourier series in one angle with any number of output channels.
 *
 * Row 0 of the coefficient matrix is the DC term, rows 2k-1 and 2k hold the
 * cos(k phi) and sin(k phi) coefficients; one column per channel.
 */
class FourierSeries {
 public:
  FourierSeries() = default;
  FourierSeries(int order, Eigen::MatrixXd coefficients);

  /// Constant series (order 0) with the given channel values.
  static FourierSeries constant(const Eigen::VectorXd& values);

  int order() const { return order_; }
  Eigen::Index channels() const { return coeffs_.cols(); }
  const Eigen::MatrixXd& coefficients() const { return coeffs_; }

  Eigen::VectorXd eval(double phase) const;
  double eval(double phase, Eigen::Index channel) const;

  /// Values at many phases, one row per phase.
  Eigen::MatrixXd eval_many(std::span<const double> phases) const;

  /// d/dphi of the series, times scale.
  FourierSeries derivative(double scale = 1.0) const;

 private:
  int order_ = 0;
  Eigen::MatrixXd coeffs_;
};

/// Least-squares Fourier fit of values (one row per sample, one column per
/// channel) against phases. Requires at least 2K+1 samples and a largest
/// circular gap between sorted phases below pi/K; throws NumericalError when the
/// design is ill-conditioned.
FourierSeries fit_fourier(std::span<const double> phases, const Eigen::MatrixXd& values,
                          int order);
FourierSeries fit_fourier(std::span<const double> phases, std::span<const double> values,
                          int order);

/// Largest gap between consecutive phases on the circle (phases taken mod 2pi).
double max_phase_gap(std::span<const double> phases);

/**
 * Forward-backward Butterworth low-pass filter (zero net phase).
 *
 * `order` is the per-pass order; the magnitude response of the combined
 * filter is the single-pass response squared. Edges are padded by odd
 * reflection and each pass starts from the steady state of its first sample.
 */
std::vector<double> zero_phase_lowpass(std::span<const double> x, double dt, double cutoff,
                                       int order = 2);

/// Samples needed for the filter transient to settle at this cutoff.
std::size_t filter_settle_length(double dt, double cutoff);

/// Central differences in the interior, second-order one-sided at both ends.
std::vector<double> finite_diff(std::span<const double> x, double dt);

struct PcaResult {
  Eigen::RowVectorXd mean;
  Eigen::MatrixXd components;        // features x k, orthonormal columns
  Eigen::VectorXd eigenvalues;       // all covariance eigenvalues, descending
  Eigen::VectorXd variance_explained;  // per retained component, fraction of total
  double cumulative_explained = 0.0;
  Eigen::MatrixXd projector;         // components * components^T
  int requested = 0;
  int rank = 0;
  bool truncated = false;            // requested k exceeded numerical rank

  Eigen::MatrixXd project(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& scores) const;
};

/// Principal components of the rows of x (samples x features), centered.
PcaResult pca_reduce(const Eigen::MatrixXd& x, int k);

}  // namespace gaitid

#pragma once

#include <Eigen/Core>

namespace gaitid {

struct LeastSquaresFit {
  Eigen::MatrixXd coefficients;  // cols(X) x cols(Y)
  double condition = 1.0;        // of the column-equilibrated Gram matrix
  bool ridge = false;            // ridge fallback engaged
};

/**
 * Ordinary least squares for several right-hand sides via column-equilibrated
 * normal equations. When the equilibrated Gram matrix has condition number
 * above `max_condition`, a ridge term of 1e-8 * trace is added before solving.
 * All-zero design columns get a zero coefficient.
 */
LeastSquaresFit least_squares(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                              double max_condition = 1e8);

/// Same, with a per-column ridge weight on the equilibrated coefficients
/// (penalty[j] * beta_j^2, where column j has unit norm after equilibration).
LeastSquaresFit least_squares(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                              const Eigen::VectorXd& penalty, double max_condition = 1e8);

}  // namespace gaitid

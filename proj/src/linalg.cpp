#include "gaitid/linalg.hpp"

#include <cmath>
#include <span>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "gaitid/error.hpp"
#include "gaitid/kernels.hpp"

namespace gaitid {

LeastSquaresFit least_squares(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                              double max_condition) {
  return least_squares(x, y, Eigen::VectorXd(), max_condition);
}

LeastSquaresFit least_squares(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                              const Eigen::VectorXd& penalty, double max_condition) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (y.rows() != n) throw InvalidArgument("least_squares: row count mismatch");
  if (penalty.size() != 0 && (penalty.size() != p || (penalty.array() < 0.0).any())) {
    throw InvalidArgument("least_squares: penalty needs one non-negative weight per column");
  }

  Eigen::MatrixXd g(p, p);
  kernels::gram(std::span<const double>(x.data(), static_cast<size_t>(x.size())),
                static_cast<size_t>(n), static_cast<size_t>(p),
                std::span<double>(g.data(), static_cast<size_t>(g.size())));
  Eigen::MatrixXd xty(p, y.cols());
  for (Eigen::Index a = 0; a < p; ++a) {
    const std::span<const double> col(x.data() + a * n, static_cast<size_t>(n));
    for (Eigen::Index c = 0; c < y.cols(); ++c) {
      xty(a, c) = kernels::dot(col, std::span<const double>(y.data() + c * n,
                                                             static_cast<size_t>(n)));
    }
  }

  // Equilibrate columns; zero columns drop out of the system.
  Eigen::VectorXd scale(p);
  for (Eigen::Index a = 0; a < p; ++a) {
    scale[a] = g(a, a) > 0.0 ? 1.0 / std::sqrt(g(a, a)) : 0.0;
  }
  Eigen::MatrixXd gs = scale.asDiagonal() * g * scale.asDiagonal();
  for (Eigen::Index a = 0; a < p; ++a) {
    if (scale[a] == 0.0) gs(a, a) = 1.0;
  }
  Eigen::MatrixXd rhs = scale.asDiagonal() * xty;
  if (penalty.size() != 0) gs.diagonal() += penalty;

  LeastSquaresFit fit;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gs, Eigen::EigenvaluesOnly);
  const double lmax = eig.eigenvalues().maxCoeff();
  const double lmin = eig.eigenvalues().minCoeff();
  fit.condition = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  if (!(fit.condition <= max_condition)) {
    fit.ridge = true;
    gs.diagonal().array() += 1e-8 * gs.trace();
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gs);
  if (ldlt.info() != Eigen::Success) {
    throw NumericalError("least_squares", "normal equations could not be factorized");
  }
  fit.coefficients = scale.asDiagonal() * ldlt.solve(rhs);
  if (!fit.coefficients.allFinite()) {
    throw NumericalError("least_squares", "non-finite coefficients");
  }
  return fit;
}

}  // namespace gaitid

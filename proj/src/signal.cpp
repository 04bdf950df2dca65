#include "gaitid/signal.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "gaitid/error.hpp"
#include "gaitid/kernels.hpp"
#include "gaitid/linalg.hpp"

namespace gaitid {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::RowVectorXd basis_row(double phase, int order) {
  Eigen::RowVectorXd row(2 * order + 1);
  row[0] = 1.0;
  for (int k = 1; k <= order; ++k) {
    row[2 * k - 1] = std::cos(k * phase);
    row[2 * k] = std::sin(k * phase);
  }
  return row;
}

// One second-order (or first-order, b2 = a2 = 0) section, transposed direct
// form II, normalized so a0 = 1 and DC gain is 1.
struct Section {
  double b0, b1, b2, a1, a2;

  void run(std::vector<double>& x) const {
    // Steady state for a constant input equal to x[0].
    double z2 = (b2 - a2) * x[0];
    double z1 = (1.0 - b0) * x[0];
    for (double& v : x) {
      const double in = v;
      const double out = b0 * in + z1;
      z1 = b1 * in - a1 * out + z2;
      z2 = b2 * in - a2 * out;
      v = out;
    }
  }
};

std::vector<Section> butterworth_sections(double dt, double cutoff, int order) {
  const double k = 2.0 / dt;
  const double w = k * std::tan(std::numbers::pi * cutoff * dt);
  std::vector<Section> sections;
  for (int i = 0; i < order / 2; ++i) {
    const double angle = std::numbers::pi * (2.0 * i + order + 1.0) / (2.0 * order);
    const double re = w * std::cos(angle);
    const double a0 = k * k - 2.0 * re * k + w * w;
    sections.push_back({w * w / a0, 2.0 * w * w / a0, w * w / a0, 2.0 * (w * w - k * k) / a0,
                        (k * k + 2.0 * re * k + w * w) / a0});
  }
  if (order % 2 == 1) {
    const double a0 = k + w;
    sections.push_back({w / a0, w / a0, 0.0, (w - k) / a0, 0.0});
  }
  return sections;
}

}  // namespace

FourierSeries::FourierSeries(int order, Eigen::MatrixXd coefficients)
    : order_(order), coeffs_(std::move(coefficients)) {
  if (order < 0 || coeffs_.rows() != 2 * order + 1) {
    throw InvalidArgument("FourierSeries: coefficient rows must equal 2*order+1");
  }
}

FourierSeries FourierSeries::constant(const Eigen::VectorXd& values) {
  return FourierSeries(0, values.transpose());
}

Eigen::VectorXd FourierSeries::eval(double phase) const {
  return (basis_row(phase, order_) * coeffs_).transpose();
}

double FourierSeries::eval(double phase, Eigen::Index channel) const {
  return basis_row(phase, order_).dot(coeffs_.col(channel));
}

Eigen::MatrixXd FourierSeries::eval_many(std::span<const double> phases) const {
  const auto n = static_cast<Eigen::Index>(phases.size());
  Eigen::MatrixXd basis(n, 2 * order_ + 1);
  kernels::fourier_basis(phases, order_, std::span<double>(basis.data(), basis.size()));
  return basis * coeffs_;
}

FourierSeries FourierSeries::derivative(double scale) const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(coeffs_.rows(), coeffs_.cols());
  for (int k = 1; k <= order_; ++k) {
    // d/dphi [a cos k phi + b sin k phi] = k b cos k phi - k a sin k phi
    d.row(2 * k - 1) = scale * k * coeffs_.row(2 * k);
    d.row(2 * k) = -scale * k * coeffs_.row(2 * k - 1);
  }
  return FourierSeries(order_, std::move(d));
}

double max_phase_gap(std::span<const double> phases) {
  if (phases.empty()) return kTwoPi;
  std::vector<double> p(phases.begin(), phases.end());
  for (double& v : p) {
    v = std::fmod(v, kTwoPi);
    if (v < 0.0) v += kTwoPi;
  }
  std::sort(p.begin(), p.end());
  double gap = p.front() + kTwoPi - p.back();
  for (size_t i = 1; i < p.size(); ++i) gap = std::max(gap, p[i] - p[i - 1]);
  return gap;
}

FourierSeries fit_fourier(std::span<const double> phases, const Eigen::MatrixXd& values,
                          int order) {
  const auto n = static_cast<Eigen::Index>(phases.size());
  if (order < 0) throw InvalidArgument("fit_fourier: negative order");
  if (values.rows() != n) throw InvalidArgument("fit_fourier: phase/value length mismatch");
  if (n < 2 * order + 1) {
    throw NumericalError("fit_fourier", "fewer samples than 2K+1 coefficients");
  }
  if (order > 0 && max_phase_gap(phases) >= std::numbers::pi / order) {
    throw NumericalError("fit_fourier", "insufficient phase coverage for the requested order");
  }
  Eigen::MatrixXd basis(n, 2 * order + 1);
  kernels::fourier_basis(phases, order, std::span<double>(basis.data(), basis.size()));
  const LeastSquaresFit fit = least_squares(basis, values);
  if (fit.ridge) throw NumericalError("fit_fourier", "ill-conditioned Fourier design");
  return FourierSeries(order, fit.coefficients);
}

FourierSeries fit_fourier(std::span<const double> phases, std::span<const double> values,
                          int order) {
  const Eigen::Map<const Eigen::VectorXd> v(values.data(), static_cast<Eigen::Index>(values.size()));
  return fit_fourier(phases, Eigen::MatrixXd(v), order);
}

std::size_t filter_settle_length(double dt, double cutoff) {
  return static_cast<std::size_t>(std::ceil(2.0 / (cutoff * dt)));
}

std::vector<double> zero_phase_lowpass(std::span<const double> x, double dt, double cutoff,
                                       int order) {
  if (!(dt > 0.0) || !(cutoff > 0.0)) {
    throw InvalidArgument("zero_phase_lowpass: dt and cutoff must be positive");
  }
  if (cutoff >= 0.5 / dt) throw InvalidArgument("zero_phase_lowpass: cutoff at or above Nyquist");
  if (order < 1 || order > 8) throw InvalidArgument("zero_phase_lowpass: order must be in [1, 8]");
  const size_t n = x.size();
  const size_t settle = filter_settle_length(dt, cutoff);
  if (n < 3 * settle) {
    throw InvalidArgument("zero_phase_lowpass: series shorter than three settle lengths");
  }

  const size_t pad = std::min(3 * settle, n - 1);
  std::vector<double> buf;
  buf.reserve(n + 2 * pad);
  for (size_t i = pad; i >= 1; --i) buf.push_back(2.0 * x[0] - x[i]);
  buf.insert(buf.end(), x.begin(), x.end());
  for (size_t i = 1; i <= pad; ++i) buf.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  const auto sections = butterworth_sections(dt, cutoff, order);
  for (const auto& s : sections) s.run(buf);
  std::reverse(buf.begin(), buf.end());
  for (const auto& s : sections) s.run(buf);
  std::reverse(buf.begin(), buf.end());
  return {buf.begin() + static_cast<std::ptrdiff_t>(pad),
          buf.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

std::vector<double> finite_diff(std::span<const double> x, double dt) {
  const size_t n = x.size();
  if (n < 3) throw InvalidArgument("finite_diff: need at least 3 samples");
  std::vector<double> out(n);
  kernels::central_diff(x, dt, out);
  out[0] = (-3.0 * x[0] + 4.0 * x[1] - x[2]) / (2.0 * dt);
  out[n - 1] = (3.0 * x[n - 1] - 4.0 * x[n - 2] + x[n - 3]) / (2.0 * dt);
  return out;
}

Eigen::MatrixXd PcaResult::project(const Eigen::MatrixXd& x) const {
  return (x.rowwise() - mean) * components;
}

Eigen::MatrixXd PcaResult::reconstruct(const Eigen::MatrixXd& scores) const {
  return (scores * components.transpose()).rowwise() + mean;
}

PcaResult pca_reduce(const Eigen::MatrixXd& x, int k) {
  const Eigen::Index n = x.rows();
  const Eigen::Index f = x.cols();
  if (n < 2) throw InvalidArgument("pca_reduce: need at least two samples");
  if (k < 1 || k > f) throw InvalidArgument("pca_reduce: k must be in [1, features]");

  PcaResult out;
  out.mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - out.mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw NumericalError("pca", "eigendecomposition failed");

  // Eigen returns ascending order.
  out.eigenvalues = eig.eigenvalues().reverse().cwiseMax(0.0);
  const Eigen::MatrixXd vectors = eig.eigenvectors().rowwise().reverse();
  const double total = out.eigenvalues.sum();
  const double lmax = out.eigenvalues[0];
  out.rank = 0;
  for (Eigen::Index i = 0; i < f; ++i) {
    if (out.eigenvalues[i] > 1e-12 * lmax) ++out.rank;
  }
  out.requested = k;
  out.truncated = k > out.rank;
  const int kept = std::max(1, std::min(k, out.rank));
  out.components = vectors.leftCols(kept);
  out.variance_explained =
      total > 0.0 ? Eigen::VectorXd(out.eigenvalues.head(kept) / total) : Eigen::VectorXd::Zero(kept);
  out.cumulative_explained = out.variance_explained.sum();
  out.projector = out.components * out.components.transpose();
  return out;
}

}  // namespace gaitid

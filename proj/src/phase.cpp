#include "gaitid/phase.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "gaitid/error.hpp"

namespace gaitid {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_2pi(double v) {
  double w = std::fmod(v, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w;
}

std::vector<double> unwrap(const std::vector<double>& angles) {
  std::vector<double> out(angles.size());
  if (angles.empty()) return out;
  out[0] = angles[0];
  for (size_t i = 1; i < angles.size(); ++i) {
    double d = angles[i] - angles[i - 1];
    d = std::remainder(d, kTwoPi);
    out[i] = out[i - 1] + d;
  }
  return out;
}

}  // namespace

std::vector<double> estimate_protophase(const Eigen::MatrixXd& r) {
  if (r.rows() < 3) throw InvalidArgument("estimate_protophase: too few samples");
  Eigen::MatrixXd x = r;
  if (x.cols() == 1) throw DegenerateOscillation("one shape channel cannot define a planar phase");

  const PcaResult pca = pca_reduce(x, 2);
  const double l1 = pca.eigenvalues[0];
  const double l2 = pca.eigenvalues.size() > 1 ? pca.eigenvalues[1] : 0.0;
  if (!(l2 >= 1e-6 * l1) || pca.components.cols() < 2) {
    throw DegenerateOscillation(
        "second principal variance below 1e-6 of the first (synchronized or zero-area gait)");
  }
  Eigen::MatrixXd z = pca.project(x);
  z.col(0) /= std::sqrt(l1);
  z.col(1) /= std::sqrt(l2);

  std::vector<double> angle(static_cast<size_t>(z.rows()));
  for (Eigen::Index i = 0; i < z.rows(); ++i) angle[i] = std::atan2(z(i, 1), z(i, 0));
  std::vector<double> out = unwrap(angle);
  if (out.back() < out.front()) {
    for (double& v : out) v = -v;
  }
  return out;
}

double PhaseCorrection::apply(double protophase) const {
  return protophase + residual_.eval(wrap_2pi(protophase), 0);
}

double PhaseCorrection::min_slope() const {
  const FourierSeries d = residual_.derivative();
  double m = std::numeric_limits<double>::infinity();
  constexpr int grid = 2048;
  for (int i = 0; i < grid; ++i) m = std::min(m, 1.0 + d.eval(kTwoPi * i / grid, 0));
  return m;
}

PhaseCorrection fit_phase_correction(std::span<const double> protophase, std::span<const double> t,
                                     const PhaseCorrectionOptions& opts) {
  const size_t n = protophase.size();
  if (t.size() != n || n < 3) throw InvalidArgument("correct_phase: length mismatch or too short");
  if (opts.bins < 2 * opts.order + 1) {
    throw InvalidArgument("correct_phase: need at least 2K+1 bins");
  }
  if (std::abs(protophase.back() - protophase.front()) < 3.0 * kTwoPi) {
    throw InvalidArgument("correct_phase: protophase must wind at least three cycles");
  }

  // Time spent in each protophase bin.
  std::vector<double> weight(static_cast<size_t>(opts.bins), 0.0);
  for (size_t i = 0; i < n; ++i) {
    const double lo = i == 0 ? t[0] : 0.5 * (t[i - 1] + t[i]);
    const double hi = i + 1 == n ? t[n - 1] : 0.5 * (t[i] + t[i + 1]);
    auto b = static_cast<size_t>(wrap_2pi(protophase[i]) / kTwoPi * opts.bins);
    if (b >= weight.size()) b = weight.size() - 1;
    weight[b] += hi - lo;
  }
  double total = 0.0;
  for (double w : weight) total += w;

  std::vector<double> edges(weight.size());
  Eigen::VectorXd residual(static_cast<Eigen::Index>(weight.size()));
  double cum = 0.0;
  for (size_t j = 0; j < weight.size(); ++j) {
    edges[j] = kTwoPi * static_cast<double>(j) / opts.bins;
    residual[static_cast<Eigen::Index>(j)] = kTwoPi * cum / total - edges[j];
    cum += weight[j];
  }
  PhaseCorrection corr(fit_fourier(edges, Eigen::MatrixXd(residual), opts.order));
  if (corr.min_slope() <= 0.0) {
    throw NumericalError("correct_phase", "smoothed phase map is not monotone");
  }
  return corr;
}

std::vector<double> correct_phase(std::span<const double> protophase, std::span<const double> t,
                                  const PhaseCorrectionOptions& opts) {
  const PhaseCorrection corr = fit_phase_correction(protophase, t, opts);
  std::vector<double> out(protophase.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = corr.apply(protophase[i]);
  return out;
}

std::vector<double> clock_phase(const InputSchedule& schedule, std::span<const double> t) {
  std::vector<double> out(t.size());
  for (size_t i = 0; i < t.size(); ++i) out[i] = schedule.phase(t[i]);
  return out;
}

std::vector<double> clock_phase(std::span<const double> durations, double t0,
                                std::span<const double> t) {
  if (durations.empty()) throw InvalidArgument("clock_phase: empty schedule");
  std::vector<double> starts(durations.size());
  double s = t0;
  for (size_t k = 0; k < durations.size(); ++k) {
    if (!(durations[k] > 0.0)) throw InvalidArgument("clock_phase: non-positive cycle duration");
    starts[k] = s;
    s += durations[k];
  }
  std::vector<double> out(t.size());
  for (size_t i = 0; i < t.size(); ++i) {
    const auto it = std::upper_bound(starts.begin(), starts.end(), t[i]);
    const size_t k = it == starts.begin() ? 0 : static_cast<size_t>(it - starts.begin()) - 1;
    out[i] = kTwoPi * (static_cast<double>(k) + (t[i] - starts[k]) / durations[k]);
  }
  return out;
}

std::vector<double> align_phase_origin(std::span<const double> phase,
                                       std::span<const double> reference) {
  if (phase.size() != reference.size()) throw InvalidArgument("align_phase_origin: length mismatch");
  std::complex<double> acc = 0.0;
  for (size_t i = 0; i < phase.size(); ++i) acc += std::polar(1.0, phase[i] - reference[i]);
  const double offset = std::arg(acc);
  std::vector<double> out(phase.begin(), phase.end());
  for (double& v : out) v -= offset;
  return out;
}

long winding_count(std::span<const double> phase) {
  if (phase.size() < 2) return 0;
  return std::lround((phase.back() - phase.front()) / kTwoPi);
}

double circular_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw InvalidArgument("circular_correlation: bad input");
  std::complex<double> ma = 0.0;
  std::complex<double> mb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    ma += std::polar(1.0, a[i]);
    mb += std::polar(1.0, b[i]);
  }
  const double abar = std::arg(ma);
  const double bbar = std::arg(mb);
  double num = 0.0;
  double da = 0.0;
  double db = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double sa = std::sin(a[i] - abar);
    const double sb = std::sin(b[i] - bbar);
    num += sa * sb;
    da += sa * sa;
    db += sb * sb;
  }
  return num / std::sqrt(da * db);
}

double phase_rate_cov(std::span<const double> phase, double dt) {
  const std::vector<double> rate = finite_diff(phase, dt);
  const Eigen::Map<const Eigen::VectorXd> v(rate.data(), static_cast<Eigen::Index>(rate.size()));
  const double mean = v.mean();
  const double var = (v.array() - mean).square().sum() / static_cast<double>(v.size());
  return std::sqrt(var) / std::abs(mean);
}

LimitCycle extract_limit_cycle(std::span<const double> phase, const Eigen::MatrixXd& r,
                               std::span<const double> u, int order, double mean_phase_rate) {
  const auto n = static_cast<Eigen::Index>(phase.size());
  if (r.rows() != n || static_cast<Eigen::Index>(u.size()) != n) {
    throw InvalidArgument("extract_limit_cycle: length mismatch");
  }
  Eigen::MatrixXd values(n, r.cols() + 1);
  values.leftCols(r.cols()) = r;
  values.col(r.cols()) = Eigen::Map<const Eigen::VectorXd>(u.data(), n);
  const FourierSeries joint = fit_fourier(phase, values, order);

  LimitCycle lc;
  lc.shape = FourierSeries(order, joint.coefficients().leftCols(r.cols()));
  lc.input = FourierSeries(order, joint.coefficients().rightCols(1));
  lc.mean_phase_rate = mean_phase_rate;
  lc.shape_rate = lc.shape.derivative(mean_phase_rate);
  return lc;
}

}  // namespace gaitid

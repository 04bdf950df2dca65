#include "gaitid/gait_model.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "gaitid/error.hpp"
#include "gaitid/linalg.hpp"

namespace gaitid {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
using json = nlohmann::json;

double wrap_2pi(double v) {
  double w = std::fmod(v, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w;
}

// Columns whose RMS is below this are treated as exactly zero regressors.
constexpr double kZeroColumnRms = 1e-12;

bool zero_small_columns(Eigen::MatrixXd& x, Eigen::Index first) {
  bool all_zero = true;
  for (Eigen::Index c = first; c < x.cols(); ++c) {
    const double rms = x.col(c).norm() / std::sqrt(static_cast<double>(x.rows()));
    if (rms <= kZeroColumnRms) {
      x.col(c).setZero();
    } else {
      all_zero = false;
    }
  }
  return all_zero;
}

std::vector<std::vector<Eigen::Index>> window_members(const RegressionDataset& ds) {
  std::vector<std::vector<Eigen::Index>> members(static_cast<size_t>(ds.windows));
  for (size_t i = 0; i < ds.size(); ++i) {
    members[static_cast<size_t>(ds.window[i])].push_back(static_cast<Eigen::Index>(i));
  }
  return members;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array()) throw InvalidArgument("model document: matrix must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j.at(static_cast<size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw InvalidArgument("model document: ragged matrix");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row.at(static_cast<size_t>(c)).get<double>();
  }
  return m;
}

json series_to_json(const FourierSeries& s) {
  return {{"order", s.order()}, {"coefficients", matrix_to_json(s.coefficients())}};
}

FourierSeries series_from_json(const json& j) {
  return FourierSeries(j.at("order").get<int>(), matrix_from_json(j.at("coefficients")));
}

json fit_meta(bool degenerate, bool ridge, double condition, std::size_t samples) {
  return {{"degenerate", degenerate},
          {"ridge", ridge},
          {"condition", std::isfinite(condition) ? json(condition) : json(nullptr)},
          {"samples", samples}};
}

template <class W>
void read_meta(const json& j, W& w) {
  w.degenerate = j.at("degenerate").get<bool>();
  w.ridge = j.at("ridge").get<bool>();
  w.condition = j.at("condition").is_null() ? std::numeric_limits<double>::infinity()
                                            : j.at("condition").get<double>();
  w.samples = j.at("samples").get<std::size_t>();
}

}  // namespace

std::vector<int> assign_windows(std::span<const double> phi, int windows) {
  if (windows < 8) throw InvalidArgument("assign_windows: need at least 8 windows");
  std::vector<int> out(phi.size());
  for (size_t i = 0; i < phi.size(); ++i) {
    int m = static_cast<int>(wrap_2pi(phi[i]) / kTwoPi * windows);
    out[i] = std::min(m, windows - 1);
  }
  const std::vector<std::size_t> counts = window_counts(out, windows);
  for (int m = 0; m < windows; ++m) {
    if (counts[static_cast<size_t>(m)] == 0) {
      throw NumericalError("assign_windows", "window " + std::to_string(m) + " is empty");
    }
  }
  return out;
}

std::vector<std::size_t> window_counts(std::span<const int> window, int windows) {
  std::vector<std::size_t> counts(static_cast<size_t>(windows), 0);
  for (int m : window) {
    if (m < 0 || m >= windows) throw InvalidArgument("window_counts: index out of range");
    ++counts[static_cast<size_t>(m)];
  }
  return counts;
}

RegressionDataset build_dataset(const LimitCycle& lc, std::span<const double> phi,
                                const Eigen::MatrixXd& r, const Eigen::MatrixXd& r_dot,
                                std::span<const double> u, const Eigen::MatrixXd& xi, int windows) {
  const auto n = static_cast<Eigen::Index>(phi.size());
  if (r.rows() != n || r_dot.rows() != n || xi.rows() != n ||
      static_cast<Eigen::Index>(u.size()) != n) {
    throw InvalidArgument("build_dataset: length mismatch");
  }
  if (xi.cols() != 3 || r.cols() != lc.shape_dim() || r_dot.cols() != r.cols()) {
    throw InvalidArgument("build_dataset: column mismatch");
  }
  RegressionDataset ds;
  ds.phi.assign(phi.begin(), phi.end());
  ds.delta_r = r - lc.shape.eval_many(phi);
  ds.delta_r_dot = r_dot - lc.shape_rate.eval_many(phi);
  ds.delta_u = Eigen::Map<const Eigen::VectorXd>(u.data(), n) - lc.input.eval_many(phi).col(0);
  ds.xi = xi;
  ds.windows = windows;
  ds.window = assign_windows(phi, windows);
  ds.counts = window_counts(ds.window, windows);
  return ds;
}

Eigen::Vector3d BodyVelWindow::eval(const Eigen::VectorXd& dr, const Eigen::VectorXd& dr_dot) const {
  const auto n = dr.size();
  Eigen::VectorXd cross(n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) cross[i * n + j] = dr[i] * dr_dot[j];
  }
  return C + B * dr + A * dr_dot + dA * cross;
}

Eigen::VectorXd ActuatorWindow::eval(const Eigen::VectorXd& dr, double du) const {
  return D + E_r * dr + E_u * du;
}

std::vector<BodyVelWindow> fit_bodyvel_model(const RegressionDataset& ds, double shape_penalty) {
  const Eigen::Index n = ds.shape_dim();
  const Eigen::Index p = 1 + 2 * n + n * n;
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(p, shape_penalty);
  penalty[0] = 0.0;
  penalty.segment(1 + n, n).setZero();
  std::vector<BodyVelWindow> out;
  out.reserve(static_cast<size_t>(ds.windows));
  for (const auto& idx : window_members(ds)) {
    const auto rows = static_cast<Eigen::Index>(idx.size());
    if (rows < 3 * p) {
      throw NumericalError("fit_bodyvel_model", "under-determined window (" +
                                                    std::to_string(rows) + " samples for " +
                                                    std::to_string(p) + " regressors)");
    }
    Eigen::MatrixXd x(rows, p);
    Eigen::MatrixXd y(rows, 3);
    for (Eigen::Index k = 0; k < rows; ++k) {
      const Eigen::Index i = idx[static_cast<size_t>(k)];
      x(k, 0) = 1.0;
      x.block(k, 1, 1, n) = ds.delta_r.row(i);
      x.block(k, 1 + n, 1, n) = ds.delta_r_dot.row(i);
      for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
          x(k, 1 + 2 * n + a * n + b) = ds.delta_r(i, a) * ds.delta_r_dot(i, b);
        }
      }
      y.row(k) = ds.xi.row(i);
    }
    BodyVelWindow w;
    w.degenerate = zero_small_columns(x, 1);
    const LeastSquaresFit fit = least_squares(x, y, penalty);
    const Eigen::MatrixXd c = fit.coefficients.transpose();  // 3 x p
    w.C = c.col(0);
    w.B = c.middleCols(1, n);
    w.A = c.middleCols(1 + n, n);
    w.dA = c.rightCols(n * n);
    w.ridge = fit.ridge;
    w.condition = fit.condition;
    w.samples = static_cast<std::size_t>(rows);
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<ActuatorWindow> fit_actuator_model(const RegressionDataset& ds) {
  const Eigen::Index n = ds.shape_dim();
  const Eigen::Index p = 2 + n;
  std::vector<ActuatorWindow> out;
  out.reserve(static_cast<size_t>(ds.windows));
  for (const auto& idx : window_members(ds)) {
    const auto rows = static_cast<Eigen::Index>(idx.size());
    if (rows < 3 * p) {
      throw NumericalError("fit_actuator_model", "under-determined window (" +
                                                     std::to_string(rows) + " samples for " +
                                                     std::to_string(p) + " regressors)");
    }
    Eigen::MatrixXd x(rows, p);
    Eigen::MatrixXd y(rows, n);
    for (Eigen::Index k = 0; k < rows; ++k) {
      const Eigen::Index i = idx[static_cast<size_t>(k)];
      x(k, 0) = 1.0;
      x.block(k, 1, 1, n) = ds.delta_r.row(i);
      x(k, 1 + n) = ds.delta_u[i];
      y.row(k) = ds.delta_r_dot.row(i);
    }
    ActuatorWindow w;
    w.degenerate = zero_small_columns(x, 1);
    const LeastSquaresFit fit = least_squares(x, y);
    const Eigen::MatrixXd c = fit.coefficients.transpose();  // n x p
    w.D = c.col(0);
    w.E_r = c.middleCols(1, n);
    w.E_u = c.col(1 + n);
    w.ridge = fit.ridge;
    w.condition = fit.condition;
    w.samples = static_cast<std::size_t>(rows);
    out.push_back(std::move(w));
  }
  return out;
}

int coefficient_count(int n) { return 3 * (1 + 2 * n + n * n) + n * (2 + n); }

Eigen::VectorXd pack_coefficients(const BodyVelWindow& b, const ActuatorWindow& a) {
  const auto n = a.D.size();
  Eigen::VectorXd v(coefficient_count(static_cast<int>(n)));
  Eigen::Index k = 0;
  for (int row = 0; row < 3; ++row) {
    v[k++] = b.C[row];
    for (Eigen::Index j = 0; j < n; ++j) v[k++] = b.B(row, j);
    for (Eigen::Index j = 0; j < n; ++j) v[k++] = b.A(row, j);
    for (Eigen::Index j = 0; j < n * n; ++j) v[k++] = b.dA(row, j);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    v[k++] = a.D[i];
    for (Eigen::Index j = 0; j < n; ++j) v[k++] = a.E_r(i, j);
    v[k++] = a.E_u[i];
  }
  return v;
}

void unpack_coefficients(const Eigen::Ref<const Eigen::VectorXd>& v, int shape_dim,
                         BodyVelWindow& b, ActuatorWindow& a) {
  const Eigen::Index n = shape_dim;
  if (v.size() != coefficient_count(shape_dim)) {
    throw InvalidArgument("unpack_coefficients: wrong coefficient count");
  }
  b.B.resize(3, n);
  b.A.resize(3, n);
  b.dA.resize(3, n * n);
  a.D.resize(n);
  a.E_r.resize(n, n);
  a.E_u.resize(n);
  Eigen::Index k = 0;
  for (int row = 0; row < 3; ++row) {
    b.C[row] = v[k++];
    for (Eigen::Index j = 0; j < n; ++j) b.B(row, j) = v[k++];
    for (Eigen::Index j = 0; j < n; ++j) b.A(row, j) = v[k++];
    for (Eigen::Index j = 0; j < n * n; ++j) b.dA(row, j) = v[k++];
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    a.D[i] = v[k++];
    for (Eigen::Index j = 0; j < n; ++j) a.E_r(i, j) = v[k++];
    a.E_u[i] = v[k++];
  }
}

FourierSeries smooth_coefficients(const std::vector<BodyVelWindow>& body,
                                  const std::vector<ActuatorWindow>& actuator, int order) {
  if (body.empty() || body.size() != actuator.size()) {
    throw InvalidArgument("smooth_coefficients: window model count mismatch");
  }
  const auto m = static_cast<Eigen::Index>(body.size());
  const int n = static_cast<int>(actuator.front().D.size());
  Eigen::MatrixXd values(m, coefficient_count(n));
  std::vector<double> centers(static_cast<size_t>(m));
  for (Eigen::Index w = 0; w < m; ++w) {
    values.row(w) = pack_coefficients(body[static_cast<size_t>(w)],
                                      actuator[static_cast<size_t>(w)]).transpose();
    centers[static_cast<size_t>(w)] = kTwoPi * (static_cast<double>(w) + 0.5) / static_cast<double>(m);
  }
  return fit_fourier(centers, values, order);
}

GaitModel::GaitModel(LimitCycle lc, GaitModelOptions opts, std::vector<BodyVelWindow> body,
                     std::vector<ActuatorWindow> actuator)
    : lc_(std::move(lc)), opts_(opts), body_(std::move(body)), actuator_(std::move(actuator)) {
  if (static_cast<int>(body_.size()) != opts_.windows ||
      static_cast<int>(actuator_.size()) != opts_.windows) {
    throw InvalidArgument("GaitModel: window count does not match options");
  }
  smooth_ = smooth_coefficients(body_, actuator_, opts_.coeff_order);
}

double GaitModel::window_center(int m) const {
  return kTwoPi * (static_cast<double>(m) + 0.5) / static_cast<double>(opts_.windows);
}

CoefficientSet GaitModel::query(double phi) const {
  CoefficientSet out;
  unpack_coefficients(smooth_.eval(wrap_2pi(phi)), shape_dim(), out.body, out.actuator);
  return out;
}

std::string GaitModel::to_json() const {
  json doc;
  doc["format"] = "gaitid-model";
  doc["version"] = 1;
  doc["options"] = {{"windows", opts_.windows},
                    {"coeff_order", opts_.coeff_order},
                    {"limit_cycle_order", opts_.limit_cycle_order},
                    {"shape_penalty", opts_.shape_penalty}};
  doc["shape_dim"] = shape_dim();
  doc["limit_cycle"] = {{"shape", series_to_json(lc_.shape)},
                        {"input", series_to_json(lc_.input)},
                        {"mean_phase_rate", lc_.mean_phase_rate}};
  json windows = json::array();
  for (size_t m = 0; m < body_.size(); ++m) {
    const BodyVelWindow& b = body_[m];
    const ActuatorWindow& a = actuator_[m];
    windows.push_back(
        {{"body",
          {{"C", matrix_to_json(b.C)},
           {"B", matrix_to_json(b.B)},
           {"A", matrix_to_json(b.A)},
           {"dA", matrix_to_json(b.dA)},
           {"fit", fit_meta(b.degenerate, b.ridge, b.condition, b.samples)}}},
         {"actuator",
          {{"D", matrix_to_json(a.D)},
           {"E_r", matrix_to_json(a.E_r)},
           {"E_u", matrix_to_json(a.E_u)},
           {"fit", fit_meta(a.degenerate, a.ridge, a.condition, a.samples)}}}});
  }
  doc["windows"] = std::move(windows);
  doc["smoothed"] = series_to_json(smooth_);
  return doc.dump(1) + "\n";
}

GaitModel GaitModel::from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("model document: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != "gaitid-model") {
      throw InvalidArgument("model document: wrong format tag");
    }
    GaitModelOptions opts;
    opts.windows = doc.at("options").at("windows").get<int>();
    opts.coeff_order = doc.at("options").at("coeff_order").get<int>();
    opts.limit_cycle_order = doc.at("options").at("limit_cycle_order").get<int>();
    opts.shape_penalty = doc.at("options").at("shape_penalty").get<double>();

    LimitCycle lc;
    lc.shape = series_from_json(doc.at("limit_cycle").at("shape"));
    lc.input = series_from_json(doc.at("limit_cycle").at("input"));
    lc.mean_phase_rate = doc.at("limit_cycle").at("mean_phase_rate").get<double>();
    lc.shape_rate = lc.shape.derivative(lc.mean_phase_rate);

    std::vector<BodyVelWindow> body;
    std::vector<ActuatorWindow> actuator;
    for (const json& w : doc.at("windows")) {
      BodyVelWindow b;
      const json& jb = w.at("body");
      b.C = matrix_from_json(jb.at("C"));
      b.B = matrix_from_json(jb.at("B"));
      b.A = matrix_from_json(jb.at("A"));
      b.dA = matrix_from_json(jb.at("dA"));
      read_meta(jb.at("fit"), b);
      ActuatorWindow a;
      const json& ja = w.at("actuator");
      a.D = matrix_from_json(ja.at("D"));
      a.E_r = matrix_from_json(ja.at("E_r"));
      a.E_u = matrix_from_json(ja.at("E_u"));
      read_meta(ja.at("fit"), a);
      body.push_back(std::move(b));
      actuator.push_back(std::move(a));
    }
    GaitModel model(std::move(lc), opts, std::move(body), std::move(actuator));
    // Keep the stored smoothing exactly as written.
    model.smooth_ = series_from_json(doc.at("smoothed"));
    return model;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("model document: ") + e.what());
  }
}

GaitModel fit_gait_model(std::span<const double> phi, const Eigen::MatrixXd& r,
                         const Eigen::MatrixXd& r_dot, std::span<const double> u,
                         const Eigen::MatrixXd& xi, double mean_phase_rate,
                         const GaitModelOptions& opts) {
  LimitCycle lc = extract_limit_cycle(phi, r, u, opts.limit_cycle_order, mean_phase_rate);
  const RegressionDataset ds = build_dataset(lc, phi, r, r_dot, u, xi, opts.windows);
  return GaitModel(std::move(lc), opts, fit_bodyvel_model(ds, opts.shape_penalty), fit_actuator_model(ds));
}

}  // namespace gaitid

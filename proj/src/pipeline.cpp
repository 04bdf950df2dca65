#include "gaitid/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "gaitid/error.hpp"
#include "gaitid/prediction.hpp"
#include "gaitid/signal.hpp"

namespace gaitid {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Eigen::MatrixXd lowpass_columns(const Eigen::MatrixXd& x, double dt, double cutoff, int order) {
  Eigen::MatrixXd out(x.rows(), x.cols());
  std::vector<double> col(static_cast<size_t>(x.rows()));
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    Eigen::VectorXd::Map(col.data(), x.rows()) = x.col(c);
    const std::vector<double> f = zero_phase_lowpass(col, dt, cutoff, order);
    out.col(c) = Eigen::Map<const Eigen::VectorXd>(f.data(), x.rows());
  }
  return out;
}

Eigen::MatrixXd diff_columns(const Eigen::MatrixXd& x, double dt) {
  Eigen::MatrixXd out(x.rows(), x.cols());
  std::vector<double> col(static_cast<size_t>(x.rows()));
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    Eigen::VectorXd::Map(col.data(), x.rows()) = x.col(c);
    const std::vector<double> d = finite_diff(col, dt);
    out.col(c) = Eigen::Map<const Eigen::VectorXd>(d.data(), x.rows());
  }
  return out;
}

Eigen::MatrixXd xi_rows(const std::vector<BodyVelocity>& xi) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(xi.size()), 3);
  for (size_t i = 0; i < xi.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = xi[i].vector();
  return out;
}

template <class T>
std::vector<T> select(const std::vector<T>& v, const std::vector<Eigen::Index>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (Eigen::Index i : idx) out.push_back(v[static_cast<size_t>(i)]);
  return out;
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (size_t k = 0; k < idx.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = m.row(idx[k]);
  return out;
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  return {mean, sd};
}

}  // namespace

std::string derivative_source_name(DerivativeSource s) {
  return s == DerivativeSource::differentiate ? "differentiate" : "recorded";
}

DerivativeSource derivative_source_from_name(const std::string& s) {
  if (s == "differentiate") return DerivativeSource::differentiate;
  if (s == "recorded") return DerivativeSource::recorded;
  throw InvalidArgument("unknown derivative source '" + s + "'");
}

std::string phase_source_name(PhaseSource s) { return s == PhaseSource::clock ? "clock" : "data"; }

PhaseSource phase_source_from_name(const std::string& s) {
  if (s == "clock") return PhaseSource::clock;
  if (s == "data") return PhaseSource::data;
  throw InvalidArgument("unknown phase source '" + s + "'");
}

std::uint64_t derive_seed(std::uint64_t root, const std::string& stage, std::uint64_t index) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : stage) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(splitmix64(root ^ h) + index);
}

Experiment run_experiment(const Plant& plant, std::vector<CycleParams> cycles, double dt,
                          const std::optional<CycleParams>& warmup, int warmup_cycles) {
  if (cycles.empty()) throw InvalidArgument("run_experiment: no cycles");
  check_resolution(cycles, dt);
  std::optional<Eigen::VectorXd> r0;
  if (warmup_cycles > 0) {
    const CycleParams w = warmup ? *warmup : cycles.front();
    const InputSchedule ws = InputSchedule::repeat(w, static_cast<std::size_t>(warmup_cycles));
    const std::vector<double> wt = ws.sample_times(dt);
    const Trajectory tr =
        simulate(plant, [&ws](double t) { return ws.value(t); }, wt.size(), dt);
    r0 = tr.r.bottomRows(1).transpose();
  }
  Experiment ex{InputSchedule(std::move(cycles)), {}};
  const std::size_t samples = ex.schedule.sample_times(dt).size();
  const InputSchedule& s = ex.schedule;
  ex.trajectory = simulate(plant, [&s](double t) { return s.value(t); }, samples, dt, Pose{}, r0);
  return ex;
}

CycleDisplacement plant_cycle_displacement(const Plant& plant, const CycleParams& p, double dt,
                                           int warmup_cycles) {
  validate(p);
  const double tc = period(p);
  // Step that divides the cycle exactly so cycle boundaries are samples.
  const auto per_cycle = static_cast<std::size_t>(std::ceil(tc / dt - 1e-9));
  const double h = tc / static_cast<double>(per_cycle);
  const std::vector<CycleParams> one{p};
  check_resolution(one, h);
  const auto cycles = static_cast<std::size_t>(warmup_cycles) + 1;
  const InputSchedule s = InputSchedule::repeat(p, cycles);
  const Trajectory tr = simulate(plant, [&s](double t) { return s.value(t); },
                                 cycles * per_cycle + 1, h);
  CycleDisplacement out;
  out.delta = relative(tr.g[(cycles - 1) * per_cycle], tr.g[cycles * per_cycle]);
  out.t_cycle = tc;
  return out;
}

PreparedData preprocess(const Experiment& ex, const PipelineConfig& cfg) {
  const Trajectory& tr = ex.trajectory;
  const InputSchedule& s = ex.schedule;
  if (tr.size() < 3) throw InvalidArgument("preprocess: trajectory too short");

  PreparedData d;
  d.dt = tr.dt;
  d.t = tr.t;
  d.u = tr.u;
  d.phi_clock = clock_phase(s, tr.t);
  d.cycle.resize(tr.size());
  for (size_t i = 0; i < tr.size(); ++i) d.cycle[i] = static_cast<int>(s.cycle_at(tr.t[i]));
  d.cycles = s.cycle_count();

  if (cfg.derivative == DerivativeSource::differentiate) {
    const double fundamental = static_cast<double>(s.cycle_count()) / s.duration();
    d.cutoff = cfg.cutoff_factor * fundamental;
    d.r = lowpass_columns(tr.r, tr.dt, d.cutoff, cfg.filter_order);
    // The input goes through the same filter so linear input-shape relations survive.
    d.u = zero_phase_lowpass(tr.u, tr.dt, d.cutoff, cfg.filter_order);
    d.r_dot = diff_columns(d.r, tr.dt);
    const Eigen::MatrixXd xi_raw = xi_rows(body_velocity_from_poses(tr.g, tr.dt));
    d.xi = lowpass_columns(xi_raw, tr.dt, d.cutoff, cfg.filter_order);
  } else {
    d.r = tr.r;
    d.r_dot = tr.r_dot;
    d.xi = xi_rows(tr.xi);
  }

  if (cfg.phase == PhaseSource::data) {
    const std::vector<double> proto = estimate_protophase(d.r);
    const std::vector<double> corrected = correct_phase(proto, d.t, cfg.phase_correction);
    d.phi = align_phase_origin(corrected, d.phi_clock);
  } else {
    d.phi = d.phi_clock;
  }
  d.mean_phase_rate = (d.phi.back() - d.phi.front()) / (d.t.back() - d.t.front());
  return d;
}

GaitModel fit_gait_model(const PreparedData& data, const PipelineConfig& cfg,
                         const std::vector<bool>& use_cycle) {
  if (use_cycle.empty()) {
    return fit_gait_model(data.phi, data.r, data.r_dot, data.u, data.xi, data.mean_phase_rate,
                          cfg.model);
  }
  if (use_cycle.size() != data.cycles) throw InvalidArgument("fit_gait_model: cycle mask size");
  std::vector<Eigen::Index> idx;
  for (size_t i = 0; i < data.size(); ++i) {
    if (use_cycle[static_cast<size_t>(data.cycle[i])]) idx.push_back(static_cast<Eigen::Index>(i));
  }
  if (idx.empty()) throw InvalidArgument("fit_gait_model: no training cycles");
  return fit_gait_model(select(data.phi, idx), select_rows(data.r, idx),
                        select_rows(data.r_dot, idx), select(data.u, idx),
                        select_rows(data.xi, idx), data.mean_phase_rate, cfg.model);
}

std::vector<CycleSlice> cycle_slices(const PreparedData& data) {
  std::vector<CycleSlice> out(data.cycles);
  std::vector<bool> seen(data.cycles, false);
  for (size_t i = 0; i < data.size(); ++i) {
    const auto k = static_cast<size_t>(data.cycle[i]);
    if (!seen[k]) {
      out[k].begin = i;
      seen[k] = true;
    }
    out[k].end = i + 1;
  }
  return out;
}

double HeldOutErrors::gamma_r_dot() const {
  if (r_dot_base == 0.0) return r_dot_pred == 0.0 ? 1.0 : -std::numeric_limits<double>::infinity();
  return 1.0 - r_dot_pred / r_dot_base;
}

double HeldOutErrors::gamma_xi() const {
  if (xi_base == 0.0) return xi_pred == 0.0 ? 1.0 : -std::numeric_limits<double>::infinity();
  return 1.0 - xi_pred / xi_base;
}

HeldOutErrors evaluate_cycles(const GaitModel& model, const PreparedData& data,
                              const std::vector<std::size_t>& cycles, int fold,
                              std::vector<PhaseErrorRow>* rows) {
  const std::vector<CycleSlice> slices = cycle_slices(data);
  HeldOutErrors e;
  for (std::size_t k : cycles) {
    const CycleSlice sl = slices.at(k);
    if (sl.end - sl.begin < 2) continue;
    const auto b = static_cast<Eigen::Index>(sl.begin);
    const auto n = static_cast<Eigen::Index>(sl.end - sl.begin);
    const std::span<const double> t(data.t.data() + sl.begin, sl.end - sl.begin);
    const std::span<const double> u(data.u.data() + sl.begin, sl.end - sl.begin);
    const std::span<const double> phi(data.phi_clock.data() + sl.begin, sl.end - sl.begin);

    const Prediction p = predict(model, t, u, phi, data.dt);
    const Prediction q = baseline_predict(model, t, u, phi, data.dt);
    const Eigen::MatrixXd r_true = data.r.middleRows(b, n);
    const Eigen::MatrixXd rd_true = data.r_dot.middleRows(b, n);
    const Eigen::MatrixXd xi_true = data.xi.middleRows(b, n);
    const Eigen::MatrixXd xi_p = p.xi_matrix();
    const Eigen::MatrixXd xi_q = q.xi_matrix();
    const Eigen::MatrixXd xi_s = xi_from_shapes(model, phi, r_true, rd_true);

    const Eigen::VectorXd erp = (p.r_dot_hat - rd_true).rowwise().norm();
    const Eigen::VectorXd erq = (q.r_dot_hat - rd_true).rowwise().norm();
    const Eigen::VectorXd exp_ = (xi_p - xi_true).rowwise().norm();
    const Eigen::VectorXd exq = (xi_q - xi_true).rowwise().norm();
    e.r_dot_pred += erp.sum();
    e.r_dot_base += erq.sum();
    e.xi_pred += exp_.sum();
    e.xi_base += exq.sum();
    e.xi_true_shapes += (xi_s - xi_true).rowwise().norm().sum();
    e.samples += static_cast<std::size_t>(n);
    if (rows) {
      for (Eigen::Index i = 0; i < n; ++i) {
        double w = std::fmod(phi[static_cast<size_t>(i)], kTwoPi);
        if (w < 0.0) w += kTwoPi;
        rows->push_back({fold, static_cast<int>(k), w, erp[i], erq[i], exp_[i], exq[i]});
      }
    }
  }
  return e;
}

std::vector<int> fold_assignment(std::size_t cycles, int folds, std::uint64_t seed) {
  if (folds < 2) throw InvalidArgument("cross_validate: need at least two folds");
  if (cycles < static_cast<std::size_t>(folds)) {
    throw InvalidArgument("cross_validate: fewer cycles (" + std::to_string(cycles) +
                          ") than folds (" + std::to_string(folds) + ")");
  }
  std::vector<std::size_t> order(cycles);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  // Fisher-Yates with an explicit index draw so the order is library independent.
  for (std::size_t i = cycles - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(order[i], order[j]);
  }
  std::vector<int> fold(cycles);
  for (std::size_t i = 0; i < cycles; ++i) fold[order[i]] = static_cast<int>(i % folds);
  return fold;
}

CrossValidation cross_validate(const PreparedData& data, const PipelineConfig& cfg,
                               std::uint64_t seed) {
  const std::vector<int> fold = fold_assignment(data.cycles, cfg.folds, seed);
  CrossValidation cv;
  std::vector<double> gr, gx;
  for (int f = 0; f < cfg.folds; ++f) {
    std::vector<bool> train(data.cycles);
    FoldResult fr;
    fr.fold = f;
    for (std::size_t k = 0; k < data.cycles; ++k) {
      train[k] = fold[k] != f;
      if (!train[k]) fr.test_cycles.push_back(k);
    }
    const GaitModel model = fit_gait_model(data, cfg, train);
    fr.errors = evaluate_cycles(model, data, fr.test_cycles, f, &cv.phase_errors);
    fr.gamma_r_dot = fr.errors.gamma_r_dot();
    fr.gamma_xi = fr.errors.gamma_xi();
    gr.push_back(fr.gamma_r_dot);
    gx.push_back(fr.gamma_xi);
    cv.folds.push_back(std::move(fr));
  }
  std::tie(cv.mean_gamma_r_dot, cv.std_gamma_r_dot) = mean_std(gr);
  std::tie(cv.mean_gamma_xi, cv.std_gamma_xi) = mean_std(gx);
  return cv;
}

}  // namespace gaitid

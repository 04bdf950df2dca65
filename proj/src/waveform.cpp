#include "gaitid/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "gaitid/error.hpp"

namespace gaitid {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw InvalidArgument(what);
}

bool finite_all(std::initializer_list<double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

void CycleParams4::validate() const {
  require(finite_all({T_low, T_high, t_cycle, eta_ramp}), "CycleParams4: non-finite parameter");
  require(T_low < T_high, "CycleParams4: T_low must be below T_high");
  require(t_cycle > 0.0, "CycleParams4: t_cycle must be positive");
  require(eta_ramp > 0.0 && eta_ramp <= 1.0, "CycleParams4: eta_ramp must be in (0, 1]");
}

void CycleParams6::validate() const {
  require(finite_all({T_low, T_high, t_cool, t_heat, eta_cool, eta_heat}),
          "CycleParams6: non-finite parameter");
  require(T_low < T_high, "CycleParams6: T_low must be below T_high");
  require(t_cool > 0.0 && t_heat > 0.0, "CycleParams6: spans must be positive");
  require(eta_cool > 0.0 && eta_cool <= 1.0, "CycleParams6: eta_cool must be in (0, 1]");
  require(eta_heat > 0.0 && eta_heat <= 1.0, "CycleParams6: eta_heat must be in (0, 1]");
}

WaveFamily family_of(const CycleParams& p) {
  return std::holds_alternative<CycleParams4>(p) ? WaveFamily::cycle4 : WaveFamily::cycle6;
}

std::string family_name(WaveFamily f) { return f == WaveFamily::cycle4 ? "cycle4" : "cycle6"; }

WaveFamily family_from_name(const std::string& name) {
  if (name == "cycle4") return WaveFamily::cycle4;
  if (name == "cycle6") return WaveFamily::cycle6;
  throw InvalidArgument("unknown waveform family '" + name + "'");
}

const std::vector<std::string>& parameter_names(WaveFamily f) {
  static const std::vector<std::string> four{"T_low", "T_high", "t_cycle", "eta_ramp"};
  static const std::vector<std::string> six{"T_low",  "T_high",   "t_cool",
                                            "t_heat", "eta_cool", "eta_heat"};
  return f == WaveFamily::cycle4 ? four : six;
}

double period(const CycleParams& p) {
  return std::visit([](const auto& c) { return c.period(); }, p);
}

void validate(const CycleParams& p) {
  std::visit([](const auto& c) { c.validate(); }, p);
}

double shortest_ramp(const CycleParams& p) {
  if (const auto* c = std::get_if<CycleParams4>(&p)) return 0.5 * c->eta_ramp * c->t_cycle;
  const auto& c = std::get<CycleParams6>(p);
  return std::min(c.eta_cool * c.t_cool, c.eta_heat * c.t_heat);
}

Eigen::VectorXd to_vector(const CycleParams& p) {
  if (const auto* c = std::get_if<CycleParams4>(&p)) {
    return Eigen::Vector4d(c->T_low, c->T_high, c->t_cycle, c->eta_ramp);
  }
  const auto& c = std::get<CycleParams6>(p);
  Eigen::VectorXd v(6);
  v << c.T_low, c.T_high, c.t_cool, c.t_heat, c.eta_cool, c.eta_heat;
  return v;
}

CycleParams from_vector(WaveFamily f, const Eigen::VectorXd& v) {
  if (f == WaveFamily::cycle4) {
    require(v.size() == 4, "from_vector: expected 4 parameters");
    return CycleParams4{v[0], v[1], v[2], v[3]};
  }
  require(v.size() == 6, "from_vector: expected 6 parameters");
  return CycleParams6{v[0], v[1], v[2], v[3], v[4], v[5]};
}

bool ParamBox::contains(const Eigen::VectorXd& v, double tol) const {
  if (v.size() != lo.size()) return false;
  return ((v.array() >= lo.array() - tol) && (v.array() <= hi.array() + tol)).all();
}

void ParamBox::validate() const {
  const auto d = static_cast<Eigen::Index>(parameter_names(family).size());
  require(lo.size() == d && hi.size() == d && full_lo.size() == d && full_hi.size() == d,
          "ParamBox: dimension does not match the waveform family");
  require((lo.array() < hi.array()).all(), "ParamBox: every lo must be below hi");
  require((full_lo.array() <= lo.array()).all() && (hi.array() <= full_hi.array()).all(),
          "ParamBox: box leaves its admissible range");
}

ParamBox ParamBox::full(WaveFamily f, Eigen::VectorXd lo, Eigen::VectorXd hi) {
  ParamBox b;
  b.family = f;
  b.lo = lo;
  b.hi = hi;
  b.full_lo = std::move(lo);
  b.full_hi = std::move(hi);
  b.validate();
  return b;
}

ParamBox builtin_box(const std::string& name) {
  if (name == "hydrogel-full") {
    Eigen::VectorXd lo(6), hi(6);
    lo << 20.0, 45.0, 2.0, 0.5, 1.0 / 32.0, 1.0 / 32.0;
    hi << 41.0, 65.0, 8.0, 3.0, 1.0, 1.0;
    return ParamBox::full(WaveFamily::cycle6, lo, hi);
  }
  if (name == "swimmer-full") {
    return ParamBox::full(WaveFamily::cycle4, Eigen::Vector4d(-1.0, 0.2, 4.0, 1.0 / 32.0),
                          Eigen::Vector4d(-0.2, 1.0, 12.0, 1.0));
  }
  throw InvalidArgument("unknown built-in parameter box '" + name + "'");
}

std::vector<std::string> builtin_box_names() { return {"hydrogel-full", "swimmer-full"}; }

std::vector<CycleParams> sample_params(const ParamBox& box, std::size_t n, std::uint64_t seed) {
  box.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<CycleParams> out;
  out.reserve(n);
  Eigen::VectorXd v(box.dim());
  for (std::size_t i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < box.dim(); ++j) {
      v[j] = box.lo[j] + unit(rng) * (box.hi[j] - box.lo[j]);
    }
    out.push_back(from_vector(box.family, v));
  }
  return out;
}

ParamBox shrink_box(const ParamBox& box, const Eigen::VectorXd& center, double factor) {
  box.validate();
  require(center.size() == box.dim(), "shrink_box: center dimension mismatch");
  require(factor >= 0.0 && factor < 1.0, "shrink_box: factor must be in [0, 1)");
  require(((center.array() >= box.full_lo.array()) && (center.array() <= box.full_hi.array())).all(),
          "shrink_box: center outside the admissible range");
  if (factor == 0.0) return box;
  ParamBox out = box;
  for (Eigen::Index j = 0; j < box.dim(); ++j) {
    const double w = (1.0 - factor) * (box.hi[j] - box.lo[j]);
    const double c = std::clamp(center[j], box.lo[j], box.hi[j]);
    double lo = c - 0.5 * w;
    double hi = c + 0.5 * w;
    // Shift inward so the new box stays inside the current one (and hence the
    // admissible range) with its width preserved.
    if (lo < box.lo[j]) {
      hi += box.lo[j] - lo;
      lo = box.lo[j];
    }
    if (hi > box.hi[j]) {
      lo -= hi - box.hi[j];
      hi = box.hi[j];
    }
    out.lo[j] = std::max(lo, box.lo[j]);
    out.hi[j] = std::min(hi, box.hi[j]);
  }
  out.validate();
  return out;
}

ParamBox shrink_box(const ParamBox& box, const CycleParams& center, double factor) {
  require(family_of(center) == box.family, "shrink_box: center family mismatch");
  return shrink_box(box, to_vector(center), factor);
}

InputSchedule::InputSchedule(std::vector<CycleParams> cycles, double t0)
    : cycles_(std::move(cycles)), t0_(t0) {
  require(!cycles_.empty(), "InputSchedule: no cycles");
  const WaveFamily fam = family_of(cycles_.front());
  double t = t0;
  for (std::size_t k = 0; k < cycles_.size(); ++k) {
    const CycleParams& p = cycles_[k];
    require(family_of(p) == fam, "InputSchedule: mixed waveform families");
    validate(p);
    const double prev_end = knot_u_.empty() ? std::numeric_limits<double>::quiet_NaN()
                                            : knot_u_.back();
    auto knot = [&](double tk, double uk) {
      knot_t_.push_back(tk);
      knot_u_.push_back(uk);
    };
    if (const auto* c = std::get_if<CycleParams4>(&p)) {
      const double ramp = 0.5 * c->eta_ramp * c->t_cycle;
      const double half = 0.5 * c->t_cycle;
      knot(t, k == 0 ? c->T_low : prev_end);
      knot(t + ramp, c->T_high);
      knot(t + half, c->T_high);
      knot(t + half + ramp, c->T_low);
      knot(t + c->t_cycle, c->T_low);
    } else {
      const auto& s = std::get<CycleParams6>(p);
      knot(t, k == 0 ? s.T_high : prev_end);
      knot(t + s.eta_cool * s.t_cool, s.T_low);
      knot(t + s.t_cool, s.T_low);
      knot(t + s.t_cool + s.eta_heat * s.t_heat, s.T_high);
      knot(t + s.t_cool + s.t_heat, s.T_high);
    }
    starts_.push_back(t);
    durations_.push_back(period(p));
    t += period(p);
  }
  total_ = t - t0;
}

InputSchedule InputSchedule::repeat(const CycleParams& p, std::size_t n, double t0) {
  return InputSchedule(std::vector<CycleParams>(n, p), t0);
}

double InputSchedule::value(double t) const {
  require(!knot_t_.empty(), "InputSchedule: empty schedule");
  if (t <= knot_t_.front()) return knot_u_.front();
  if (t >= knot_t_.back()) return knot_u_.back();
  const auto it = std::upper_bound(knot_t_.begin(), knot_t_.end(), t);
  const auto j = static_cast<std::size_t>(it - knot_t_.begin());
  const double ta = knot_t_[j - 1];
  const double tb = knot_t_[j];
  if (tb <= ta) return knot_u_[j];
  const double w = (t - ta) / (tb - ta);
  return knot_u_[j - 1] + w * (knot_u_[j] - knot_u_[j - 1]);
}

std::size_t InputSchedule::cycle_at(double t) const {
  require(!starts_.empty(), "InputSchedule: empty schedule");
  const auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
  if (it == starts_.begin()) return 0;
  return static_cast<std::size_t>(it - starts_.begin()) - 1;
}

double InputSchedule::phase(double t) const {
  const std::size_t k = cycle_at(t);
  const double frac = (t - starts_[k]) / durations_[k];
  return 2.0 * std::numbers::pi * (static_cast<double>(k) + frac);
}

std::vector<double> InputSchedule::sample_times(double dt) const {
  require(dt > 0.0, "InputSchedule: dt must be positive");
  const auto n = static_cast<std::size_t>(std::floor(total_ / dt - 1e-9)) + 1;
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = t0_ + static_cast<double>(i) * dt;
  return t;
}

std::vector<double> InputSchedule::sample(std::span<const double> t) const {
  std::vector<double> u(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) u[i] = value(t[i]);
  return u;
}

void check_resolution(std::span<const CycleParams> cycles, double dt) {
  for (const auto& p : cycles) {
    if (shortest_ramp(p) < 4.0 * dt * (1.0 - 1e-12)) {
      throw InvalidArgument("waveform: dt too coarse, shortest ramp spans fewer than 4 samples");
    }
  }
}

std::vector<double> synth_waveform(const CycleParams& p, double dt, std::size_t n_cycles) {
  validate(p);
  require(dt > 0.0, "synth_waveform: dt must be positive");
  require(n_cycles > 0, "synth_waveform: need at least one cycle");
  check_resolution(std::span<const CycleParams>(&p, 1), dt);
  const InputSchedule s = InputSchedule::repeat(p, n_cycles);
  return s.sample(s.sample_times(dt));
}

}  // namespace gaitid

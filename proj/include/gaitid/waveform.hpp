#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace gaitid {

/// Symmetric thermal cycle: ramp up, hold high, ramp down, hold low.
/// eta_ramp = 2 t_ramp / t_cycle.
struct CycleParams4 {
  double T_low = -1.0;
  double T_high = 1.0;
  double t_cycle = 8.0;
  double eta_ramp = 0.5;

  void validate() const;
  double period() const { return t_cycle; }
};

/// Cooling span followed by heating span, each with its own ramp ratio
/// (eta = ramp time / span).
struct CycleParams6 {
  double T_low = 20.0;
  double T_high = 65.0;
  double t_cool = 3.0;
  double t_heat = 3.0;
  double eta_cool = 0.5;
  double eta_heat = 0.5;

  void validate() const;
  double period() const { return t_cool + t_heat; }
};

using CycleParams = std::variant<CycleParams4, CycleParams6>;

enum class WaveFamily { cycle4, cycle6 };

WaveFamily family_of(const CycleParams& p);
std::string family_name(WaveFamily f);
WaveFamily family_from_name(const std::string& name);
const std::vector<std::string>& parameter_names(WaveFamily f);

double period(const CycleParams& p);
void validate(const CycleParams& p);
/// Shortest ramp duration of one cycle.
double shortest_ramp(const CycleParams& p);
Eigen::VectorXd to_vector(const CycleParams& p);
CycleParams from_vector(WaveFamily f, const Eigen::VectorXd& v);

/**
 * @brief Axis-aligned box of waveform parameters inside an admissible range.
 *
 * `lo`/`hi` is the current sampling box; `full_lo`/`full_hi` is the admissible
 * range every box must stay inside.
 */
struct ParamBox {
  WaveFamily family = WaveFamily::cycle4;
  Eigen::VectorXd lo, hi;
  Eigen::VectorXd full_lo, full_hi;

  Eigen::Index dim() const { return lo.size(); }
  Eigen::VectorXd center() const { return 0.5 * (lo + hi); }
  Eigen::VectorXd width() const { return hi - lo; }
  bool contains(const Eigen::VectorXd& v, double tol = 0.0) const;
  void validate() const;

  /// Box whose sampling range equals its admissible range.
  static ParamBox full(WaveFamily f, Eigen::VectorXd lo, Eigen::VectorXd hi);
};

/// Built-in boxes: "hydrogel-full" (six-parameter admissible ranges of the
/// thermo-responsive crawler) and "swimmer-full" (four-parameter box for the
/// default swimmer plant).
ParamBox builtin_box(const std::string& name);
std::vector<std::string> builtin_box_names();

/// n independent uniform draws inside the box, deterministic in seed.
std::vector<CycleParams> sample_params(const ParamBox& box, std::size_t n, std::uint64_t seed);

/// Box whose widths are (1 - factor) times the input widths, centered on
/// `center` and shifted inward where it would leave the admissible range.
ParamBox shrink_box(const ParamBox& box, const CycleParams& center, double factor);
ParamBox shrink_box(const ParamBox& box, const Eigen::VectorXd& center, double factor);

/**
 * @brief Continuous piecewise-linear input built from consecutive cycles.
 *
 * Each cycle begins where the previous one ended (T_low for four-parameter
 * cycles, T_high for six-parameter ones), so parameter changes between cycles
 * never introduce jumps. Cycle k occupies [starts[k], starts[k] + durations[k]).
 */
class InputSchedule {
 public:
  InputSchedule() = default;
  explicit InputSchedule(std::vector<CycleParams> cycles, double t0 = 0.0);

  /// The same cycle repeated n times.
  static InputSchedule repeat(const CycleParams& p, std::size_t n, double t0 = 0.0);

  double value(double t) const;
  /// Clock phase: 2 pi (k + elapsed fraction of cycle k), unwrapped.
  double phase(double t) const;
  /// Index of the cycle containing t (clamped to the schedule).
  std::size_t cycle_at(double t) const;

  std::size_t cycle_count() const { return cycles_.size(); }
  double start_time() const { return t0_; }
  double end_time() const { return t0_ + total_; }
  double duration() const { return total_; }
  const std::vector<CycleParams>& cycles() const { return cycles_; }
  const std::vector<double>& starts() const { return starts_; }
  const std::vector<double>& durations() const { return durations_; }

  /// Sample times i*dt (offset by t0) covering [t0, end) and the input there.
  std::vector<double> sample_times(double dt) const;
  std::vector<double> sample(std::span<const double> t) const;

 private:
  std::vector<CycleParams> cycles_;
  std::vector<double> starts_, durations_;
  std::vector<double> knot_t_, knot_u_;
  double t0_ = 0.0;
  double total_ = 0.0;
};

/// n_cycles repetitions of one cycle sampled at dt. Throws InvalidArgument if
/// the shortest ramp spans fewer than 4 samples.
std::vector<double> synth_waveform(const CycleParams& p, double dt, std::size_t n_cycles);

/// Throws InvalidArgument if any ramp of the cycles is shorter than 4 dt.
void check_resolution(std::span<const CycleParams> cycles, double dt);

}  // namespace gaitid

#pragma once

#include "gaitid/optimizer.hpp"
#include "gaitid/pipeline.hpp"
#include "gaitid/plant.hpp"
#include "gaitid/waveform.hpp"

namespace fixtures {

/// 100 perturbed swimmer cycles drawn from the full box, shared across tests.
inline const gaitid::Experiment& swimmer_experiment() {
  static const gaitid::Experiment ex = [] {
    const gaitid::SwimmerPlant plant;
    const gaitid::ParamBox box = gaitid::builtin_box("swimmer-full");
    const auto cycles = gaitid::sample_params(box, 100, 7);
    return gaitid::run_experiment(plant, cycles, 0.01,
                                  gaitid::from_vector(box.family, box.center()), 2);
  }();
  return ex;
}

inline const gaitid::PreparedData& swimmer_data() {
  static const gaitid::PreparedData d = gaitid::preprocess(swimmer_experiment(), {});
  return d;
}

inline const gaitid::GaitModel& swimmer_model() {
  static const gaitid::GaitModel m = gaitid::fit_gait_model(swimmer_data(), {});
  return m;
}

/// Steady swimmer response to one repeated cycle.
inline gaitid::Experiment steady_swimmer(const gaitid::CycleParams& p, std::size_t cycles,
                                         double dt = 0.01) {
  const gaitid::SwimmerPlant plant;
  return gaitid::run_experiment(plant, std::vector<gaitid::CycleParams>(cycles, p), dt, p, 3);
}

}  // namespace fixtures

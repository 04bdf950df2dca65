#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaitid/error.hpp"
#include "gaitid/optimizer.hpp"
#include "gaitid/pipeline.hpp"
#include "gaitid/plant.hpp"
#include "gaitid/waveform.hpp"

namespace gaitid {

/// Invalid configuration document or override (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/**
 * @brief Everything a run depends on. Serialized in full (defaults included)
 * into every manifest.
 */
struct ExperimentConfig {
  std::uint64_t seed = 1;

  std::string plant = "swimmer";  // "swimmer" or "surrogate"
  SwimmerConfig swimmer;
  SurrogateConfig surrogate;

  std::string box = "swimmer-full";
  std::vector<double> box_lo, box_hi;  // optional sampling-box override (empty = full range)

  double dt = 0.01;
  std::size_t cycles = 100;
  int warmup_cycles = 2;

  PipelineConfig pipeline;
  IterateConfig iterate;

  std::unique_ptr<Plant> make_plant() const;
  /// Built-in admissible box, narrowed to box_lo/box_hi when given.
  ParamBox param_box() const;
  void validate() const;
};

nlohmann::json config_to_json(const ExperimentConfig& cfg);
/// Strict: any unknown key raises ConfigError naming it.
ExperimentConfig config_from_json(const nlohmann::json& doc);

/// Apply "a.b.c=value" to a config document. The value is parsed as JSON when
/// possible and kept as a string otherwise. The key path must already exist.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Config from a config document or a run manifest (its "config" section),
/// with overrides applied in order.
ExperimentConfig load_config(const std::string& text, const std::vector<std::string>& overrides);

/// Settings the method leaves open, listed in manifests with their values.
nlohmann::json flagged_defaults(const ExperimentConfig& cfg);

}  // namespace gaitid

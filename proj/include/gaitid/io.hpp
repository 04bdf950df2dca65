#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaitid/error.hpp"
#include "gaitid/optimizer.hpp"
#include "gaitid/pipeline.hpp"
#include "gaitid/plant.hpp"
#include "gaitid/prediction.hpp"
#include "gaitid/waveform.hpp"

namespace gaitid {

/// A required input file does not exist or cannot be read (CLI exit code 3).
class MissingArtifact : public Error {
 public:
  using Error::Error;
};

/// Relative paths are taken under $GAITID_ARTIFACT_ROOT when it is set.
std::filesystem::path artifact_path(const std::string& path);

std::string read_text(const std::filesystem::path& path);
/// Write to a temporary sibling, then rename over the target.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

std::uint64_t fnv1a64(const std::string& data);
std::string hex64(std::uint64_t v);

/// Delimited table: t,u,r1..rn,rdot1..rdotn,xi_x,xi_y,xi_theta,x,y,theta,phi.
/// phi is written as NaN when absent.
std::string trajectory_to_csv(const Trajectory& tr, std::span<const double> phi = {});
Trajectory trajectory_from_csv(const std::string& text, std::vector<double>* phi = nullptr);

std::string prediction_to_csv(const Prediction& p);

nlohmann::json params_to_json(const CycleParams& p);
CycleParams params_from_json(const nlohmann::json& j);
nlohmann::json box_to_json(const ParamBox& b);

nlohmann::json schedule_to_json(const InputSchedule& s, double dt);
InputSchedule schedule_from_json(const nlohmann::json& j);

nlohmann::json cross_validation_to_json(const CrossValidation& cv, bool include_rows);
nlohmann::json history_to_json(const OptimizationHistory& h);

/// Plot tables.
std::string export_shape_space_loop(const Trajectory& tr);
std::string export_input_cycles(const Trajectory& tr, const InputSchedule& s);
std::string export_phase_error(const nlohmann::json& report);
std::string export_iteration_objective(const nlohmann::json& history);

}  // namespace gaitid

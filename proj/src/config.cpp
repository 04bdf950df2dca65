#include "gaitid/config.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace gaitid {

namespace {

using json = nlohmann::json;

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError("config: '" + path + "' must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) {
      throw ConfigError("config: unknown key '" + (path.empty() ? key : path + "." + key) + "'");
    }
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& path) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: '" + (path.empty() ? std::string(key) : path + "." + key) +
                      "' has the wrong type");
  }
}

json vec2(const Eigen::Vector2d& v) { return json::array({v[0], v[1]}); }

void read_vec2(const json& j, const char* key, Eigen::Vector2d& out, const std::string& path) {
  if (!j.contains(key)) return;
  std::vector<double> v;
  read(j, key, v, path);
  if (v.size() != 2) throw ConfigError("config: '" + path + "." + key + "' needs 2 values");
  out = Eigen::Vector2d(v[0], v[1]);
}

json swimmer_json(const SwimmerConfig& s) {
  return {{"link_length", s.link_length},       {"drag_ratio", s.drag_ratio},
          {"longitudinal_drag", s.longitudinal_drag}, {"rate", vec2(s.rate)},
          {"slope", vec2(s.slope)},               {"offset", vec2(s.offset)},
          {"joint_limit", s.joint_limit},         {"input_min", s.input_min},
          {"input_max", s.input_max}};
}

void read_swimmer(const json& j, SwimmerConfig& s, const std::string& path) {
  check_keys(j, path,
             {"link_length", "drag_ratio", "longitudinal_drag", "rate", "slope", "offset",
              "joint_limit", "input_min", "input_max"});
  read(j, "link_length", s.link_length, path);
  read(j, "drag_ratio", s.drag_ratio, path);
  read(j, "longitudinal_drag", s.longitudinal_drag, path);
  read_vec2(j, "rate", s.rate, path);
  read_vec2(j, "slope", s.slope, path);
  read_vec2(j, "offset", s.offset, path);
  read(j, "joint_limit", s.joint_limit, path);
  read(j, "input_min", s.input_min, path);
  read(j, "input_max", s.input_max, path);
}

json surrogate_json(const SurrogateConfig& s) {
  return {{"geometry", swimmer_json(s.geometry)},
          {"rate_swell", vec2(s.rate_swell)},
          {"rate_shrink", vec2(s.rate_shrink)},
          {"slope", vec2(s.slope)},
          {"offset", vec2(s.offset)},
          {"gain", s.gain},
          {"reference", s.reference},
          {"volume_min", s.volume_min},
          {"volume_max", s.volume_max},
          {"input_min", s.input_min},
          {"input_max", s.input_max}};
}

void read_surrogate(const json& j, SurrogateConfig& s, const std::string& path) {
  check_keys(j, path,
             {"geometry", "rate_swell", "rate_shrink", "slope", "offset", "gain", "reference",
              "volume_min", "volume_max", "input_min", "input_max"});
  if (j.contains("geometry")) read_swimmer(j.at("geometry"), s.geometry, path + ".geometry");
  read_vec2(j, "rate_swell", s.rate_swell, path);
  read_vec2(j, "rate_shrink", s.rate_shrink, path);
  read_vec2(j, "slope", s.slope, path);
  read_vec2(j, "offset", s.offset, path);
  read(j, "gain", s.gain, path);
  read(j, "reference", s.reference, path);
  read(j, "volume_min", s.volume_min, path);
  read(j, "volume_max", s.volume_max, path);
  read(j, "input_min", s.input_min, path);
  read(j, "input_max", s.input_max, path);
}

}  // namespace

std::unique_ptr<Plant> ExperimentConfig::make_plant() const {
  if (plant == "swimmer") return std::make_unique<SwimmerPlant>(swimmer);
  if (plant == "surrogate") return std::make_unique<SurrogatePlant>(surrogate);
  throw ConfigError("config: unknown plant '" + plant + "'");
}

ParamBox ExperimentConfig::param_box() const {
  ParamBox b;
  try {
    b = builtin_box(box);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!box_lo.empty() || !box_hi.empty()) {
    if (static_cast<Eigen::Index>(box_lo.size()) != b.dim() ||
        static_cast<Eigen::Index>(box_hi.size()) != b.dim()) {
      throw ConfigError("config: waveform.lo/hi must have one value per parameter");
    }
    b.lo = Eigen::Map<const Eigen::VectorXd>(box_lo.data(), b.dim());
    b.hi = Eigen::Map<const Eigen::VectorXd>(box_hi.data(), b.dim());
  }
  try {
    b.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return b;
}

void ExperimentConfig::validate() const {
  try {
    (void)make_plant();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  (void)param_box();
  if (!(dt > 0.0)) throw ConfigError("config: simulation.dt must be positive");
  if (cycles < 1) throw ConfigError("config: simulation.cycles must be positive");
  if (warmup_cycles < 0) throw ConfigError("config: simulation.warmup_cycles must be >= 0");
  if (pipeline.folds < 2) throw ConfigError("config: pipeline.folds must be at least 2");
  if (pipeline.model.windows < 8) throw ConfigError("config: pipeline.windows must be at least 8");
  if (pipeline.model.coeff_order < 0 || pipeline.model.limit_cycle_order < 0) {
    throw ConfigError("config: Fourier orders must be non-negative");
  }
  if (!(pipeline.model.shape_penalty >= 0.0)) {
    throw ConfigError("config: pipeline.shape_penalty must be non-negative");
  }
  if (!(pipeline.cutoff_factor > 0.0)) throw ConfigError("config: pipeline.cutoff_factor must be positive");
  if (pipeline.filter_order < 1 || pipeline.filter_order > 8) {
    throw ConfigError("config: pipeline.filter_order must be in 1..8");
  }
  if (!(iterate.retained_width > 0.0 && iterate.retained_width <= 1.0)) {
    throw ConfigError("config: optimizer.retained_width must be in (0, 1]");
  }
  if (iterate.lambda && !(*iterate.lambda >= 0.0)) {
    throw ConfigError("config: optimizer.lambda must be non-negative");
  }
  if (iterate.n_iters < 1 || iterate.n_samples < 1) {
    throw ConfigError("config: optimizer.n_iters and n_samples must be positive");
  }
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["plant"] = {{"kind", c.plant},
                {"swimmer", swimmer_json(c.swimmer)},
                {"surrogate", surrogate_json(c.surrogate)}};
  j["waveform"] = {{"box", c.box}, {"lo", c.box_lo}, {"hi", c.box_hi}};
  j["simulation"] = {{"dt", c.dt}, {"cycles", c.cycles}, {"warmup_cycles", c.warmup_cycles}};
  const PipelineConfig& p = c.pipeline;
  j["pipeline"] = {{"derivative", derivative_source_name(p.derivative)},
                   {"phase", phase_source_name(p.phase)},
                   {"cutoff_factor", p.cutoff_factor},
                   {"filter_order", p.filter_order},
                   {"phase_bins", p.phase_correction.bins},
                   {"phase_order", p.phase_correction.order},
                   {"limit_cycle_order", p.model.limit_cycle_order},
                   {"windows", p.model.windows},
                   {"coeff_order", p.model.coeff_order},
                   {"shape_penalty", p.model.shape_penalty},
                   {"folds", p.folds},
                   {"norm", "euclidean"}};
  const IterateConfig& it = c.iterate;
  j["optimizer"] = {{"lambda", it.lambda ? json(*it.lambda) : json(nullptr)},
                    {"lambda_scale", it.lambda_scale},
                    {"n_iters", it.n_iters},
                    {"n_samples", it.n_samples},
                    {"retained_width", it.retained_width},
                    {"objective_warmup_cycles", it.objective_warmup_cycles},
                    {"fd_step", it.optimizer.h},
                    {"step_tol", it.optimizer.step_tol},
                    {"max_iterations", it.optimizer.max_iterations}};
  return j;
}

ExperimentConfig config_from_json(const json& doc) {
  ExperimentConfig c;
  check_keys(doc, "", {"seed", "plant", "waveform", "simulation", "pipeline", "optimizer"});
  read(doc, "seed", c.seed, "");
  if (doc.contains("plant")) {
    const json& p = doc.at("plant");
    check_keys(p, "plant", {"kind", "swimmer", "surrogate"});
    read(p, "kind", c.plant, "plant");
    if (p.contains("swimmer")) read_swimmer(p.at("swimmer"), c.swimmer, "plant.swimmer");
    if (p.contains("surrogate")) read_surrogate(p.at("surrogate"), c.surrogate, "plant.surrogate");
  }
  if (doc.contains("waveform")) {
    const json& w = doc.at("waveform");
    check_keys(w, "waveform", {"box", "lo", "hi"});
    read(w, "box", c.box, "waveform");
    read(w, "lo", c.box_lo, "waveform");
    read(w, "hi", c.box_hi, "waveform");
  }
  if (doc.contains("simulation")) {
    const json& s = doc.at("simulation");
    check_keys(s, "simulation", {"dt", "cycles", "warmup_cycles"});
    read(s, "dt", c.dt, "simulation");
    read(s, "cycles", c.cycles, "simulation");
    read(s, "warmup_cycles", c.warmup_cycles, "simulation");
  }
  if (doc.contains("pipeline")) {
    const json& p = doc.at("pipeline");
    check_keys(p, "pipeline",
               {"derivative", "phase", "cutoff_factor", "filter_order", "phase_bins", "phase_order",
                "limit_cycle_order", "windows", "coeff_order", "shape_penalty", "folds", "norm"});
    PipelineConfig& q = c.pipeline;
    std::string s;
    try {
      if (p.contains("derivative")) {
        read(p, "derivative", s, "pipeline");
        q.derivative = derivative_source_from_name(s);
      }
      if (p.contains("phase")) {
        read(p, "phase", s, "pipeline");
        q.phase = phase_source_from_name(s);
      }
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    if (p.contains("norm")) {
      read(p, "norm", s, "pipeline");
      if (s != "euclidean") throw ConfigError("config: pipeline.norm supports only 'euclidean'");
    }
    read(p, "cutoff_factor", q.cutoff_factor, "pipeline");
    read(p, "filter_order", q.filter_order, "pipeline");
    read(p, "phase_bins", q.phase_correction.bins, "pipeline");
    read(p, "phase_order", q.phase_correction.order, "pipeline");
    read(p, "limit_cycle_order", q.model.limit_cycle_order, "pipeline");
    read(p, "windows", q.model.windows, "pipeline");
    read(p, "coeff_order", q.model.coeff_order, "pipeline");
    read(p, "shape_penalty", q.model.shape_penalty, "pipeline");
    read(p, "folds", q.folds, "pipeline");
  }
  if (doc.contains("optimizer")) {
    const json& o = doc.at("optimizer");
    check_keys(o, "optimizer",
               {"lambda", "lambda_scale", "n_iters", "n_samples", "retained_width",
                "objective_warmup_cycles", "fd_step", "step_tol", "max_iterations"});
    IterateConfig& it = c.iterate;
    if (o.contains("lambda")) {
      if (o.at("lambda").is_null()) {
        it.lambda.reset();
      } else {
        double v = 0.0;
        read(o, "lambda", v, "optimizer");
        it.lambda = v;
      }
    }
    read(o, "lambda_scale", it.lambda_scale, "optimizer");
    read(o, "n_iters", it.n_iters, "optimizer");
    read(o, "n_samples", it.n_samples, "optimizer");
    read(o, "retained_width", it.retained_width, "optimizer");
    read(o, "objective_warmup_cycles", it.objective_warmup_cycles, "optimizer");
    read(o, "fd_step", it.optimizer.h, "optimizer");
    read(o, "step_tol", it.optimizer.step_tol, "optimizer");
    read(o, "max_iterations", it.optimizer.max_iterations, "optimizer");
  }
  // Fields shared between sections.
  c.iterate.dt = c.dt;
  c.iterate.seed = c.seed;
  c.iterate.experiment_warmup_cycles = c.warmup_cycles;
  c.iterate.pipeline = c.pipeline;
  c.validate();
  return c;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not of the form key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json* node = &doc;
  std::stringstream ss(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (size_t i = 0; i < parts.size(); ++i) {
    if (!node->is_object() || !node->contains(parts[i])) {
      throw ConfigError("config: unknown key '" + key + "'");
    }
    node = &(*node)[parts[i]];
  }
  *node = std::move(value);
}

ExperimentConfig load_config(const std::string& text, const std::vector<std::string>& overrides) {
  json doc;
  if (!text.empty()) {
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    if (doc.is_object() && doc.contains("format") && doc.at("format") == "gaitid-manifest") {
      doc = doc.at("config");
    }
  } else {
    doc = json::object();
  }
  // Fill defaults first so overrides can address any key.
  json full = config_to_json(config_from_json(doc));
  for (const std::string& o : overrides) apply_override(full, o);
  return config_from_json(full);
}

json flagged_defaults(const ExperimentConfig& c) {
  return {{"filter", {{"kind", "butterworth"},
                      {"order_per_pass", c.pipeline.filter_order},
                      {"cutoff_factor", c.pipeline.cutoff_factor}}},
          {"fourier_orders", {{"limit_cycle", c.pipeline.model.limit_cycle_order},
                              {"coefficients", c.pipeline.model.coeff_order},
                              {"phase_correction", c.pipeline.phase_correction.order}}},
          {"windows", c.pipeline.model.windows},
          {"shape_penalty", c.pipeline.model.shape_penalty},
          {"gamma_norm", "euclidean"},
          {"prediction_phase", "clock"},
          {"fit_phase", phase_source_name(c.pipeline.phase)},
          {"derivatives", derivative_source_name(c.pipeline.derivative)},
          {"shrink", {{"retained_width", c.iterate.retained_width},
                      {"reduce_by", 1.0 - c.iterate.retained_width}}},
          {"lambda", c.iterate.lambda ? nlohmann::json(*c.iterate.lambda) : nlohmann::json("auto")},
          {"lambda_scale", c.iterate.lambda_scale},
          {"plant_constants", "implementation defaults"}};
}

}  // namespace gaitid

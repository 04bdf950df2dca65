#include "gaitid/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gaitid/config.hpp"
#include "gaitid/io.hpp"
#include "gaitid/optimizer.hpp"
#include "gaitid/pipeline.hpp"
#include "gaitid/prediction.hpp"

namespace gaitid::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  std::string out = "run";
  std::string trajectory, schedule, model;
};

struct Run {
  std::string name;
  ExperimentConfig cfg;
  fs::path out;
  json inputs = json::object();
  json artifacts = json::object();
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  fs::path input(const std::string& given, const std::string& fallback) const {
    return given.empty() ? out / fallback : artifact_path(given);
  }

  std::string read(const std::string& role, const fs::path& p) {
    if (!fs::exists(p)) throw MissingArtifact(name + ": missing " + role + " '" + p.string() + "'");
    std::string text = read_text(p);
    inputs[role] = {{"path", p.string()}, {"fnv1a64", hex64(fnv1a64(text))}};
    return text;
  }

  void write(const std::string& role, const std::string& file, const std::string& text) {
    const fs::path p = out / file;
    write_text_atomic(p, text);
    artifacts[role] = {{"path", p.string()}, {"fnv1a64", hex64(fnv1a64(text))}};
  }

  void finish(json extra = json::object()) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    json m = {{"format", "gaitid-manifest"},
              {"version", kVersion},
              {"subcommand", name},
              {"config", config_to_json(cfg)},
              {"flagged_defaults", flagged_defaults(cfg)},
              {"inputs", inputs},
              {"artifacts", artifacts},
              {"wall_clock",
               {{"finished_utc", stamp},
                {"elapsed_s",
                 std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}}}};
    for (auto& [k, v] : extra.items()) m[k] = v;
    write_text_atomic(out / (name + ".manifest.json"), m.dump(1) + "\n");
  }
};

Run open_run(const std::string& name, const Common& c) {
  Run run;
  run.name = name;
  std::string text;
  if (!c.config.empty()) {
    const fs::path p = artifact_path(c.config);
    if (!fs::exists(p)) throw MissingArtifact("config file '" + p.string() + "' not found");
    text = read_text(p);
  }
  run.cfg = load_config(text, c.overrides);
  run.out = artifact_path(c.out);
  return run;
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(what + ": " + e.what());
  }
}

Experiment load_experiment(Run& run, const Common& c) {
  Experiment ex;
  ex.trajectory = trajectory_from_csv(run.read("trajectory", run.input(c.trajectory, "trajectory.csv")));
  ex.schedule = schedule_from_json(
      parse_json(run.read("schedule", run.input(c.schedule, "schedule.json")), "schedule"));
  return ex;
}

json objective_json(const ObjectiveValue& v) {
  return {{"F", v.F}, {"dx", v.dx}, {"t_cycle", v.t_cycle}};
}

json fit_report(const GaitModel& m, const PreparedData& d) {
  const int n = m.shape_dim();
  Eigen::MatrixXd Er = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd Eu = Eigen::VectorXd::Zero(n);
  json windows = json::array();
  const auto& act = m.actuator_windows();
  const auto& body = m.body_windows();
  for (std::size_t w = 0; w < act.size(); ++w) {
    Er += act[w].E_r / static_cast<double>(act.size());
    Eu += act[w].E_u / static_cast<double>(act.size());
    windows.push_back({{"window", w},
                       {"phase", m.window_center(static_cast<int>(w))},
                       {"samples", act[w].samples},
                       {"body_condition", body[w].condition},
                       {"body_degenerate", body[w].degenerate},
                       {"actuator_condition", act[w].condition},
                       {"actuator_degenerate", act[w].degenerate},
                       {"ridge", body[w].ridge || act[w].ridge}});
  }
  json er = json::array();
  for (int i = 0; i < n; ++i) {
    json row = json::array();
    for (int j = 0; j < n; ++j) row.push_back(Er(i, j));
    er.push_back(row);
  }
  return {{"format", "gaitid-fit-report"},
          {"samples", d.size()},
          {"cycles", d.cycles},
          {"cutoff_hz", d.cutoff},
          {"mean_phase_rate", d.mean_phase_rate},
          {"mean_E_r", er},
          {"mean_E_u", std::vector<double>(Eu.data(), Eu.data() + n)},
          {"windows", windows}};
}

void cmd_simulate(const Common& c) {
  Run run = open_run("simulate", c);
  const ExperimentConfig& cfg = run.cfg;
  const auto plant = cfg.make_plant();
  const ParamBox box = cfg.param_box();
  const std::uint64_t seed = derive_seed(cfg.seed, "simulate");
  const std::vector<CycleParams> cycles = sample_params(box, cfg.cycles, seed);
  const Experiment ex =
      run_experiment(*plant, cycles, cfg.dt, from_vector(box.family, box.center()), cfg.warmup_cycles);
  std::vector<double> phi(ex.trajectory.size());
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = ex.schedule.phase(ex.trajectory.t[i]);
  run.write("trajectory", "trajectory.csv", trajectory_to_csv(ex.trajectory, phi));
  run.write("schedule", "schedule.json", schedule_to_json(ex.schedule, cfg.dt).dump(1) + "\n");
  run.finish({{"seeds", {{"simulate", seed}}}});
  std::cerr << "simulate: " << cycles.size() << " cycles, " << ex.trajectory.size() << " samples\n";
}

void cmd_fit(const Common& c) {
  Run run = open_run("fit", c);
  const Experiment ex = load_experiment(run, c);
  const PreparedData d = preprocess(ex, run.cfg.pipeline);
  const GaitModel m = fit_gait_model(d, run.cfg.pipeline);
  run.write("model", "model.json", m.to_json());
  run.write("fit_report", "fit_report.json", fit_report(m, d).dump(1) + "\n");
  run.finish();
  std::cerr << "fit: " << d.size() << " samples, " << m.actuator_windows().size() << " windows\n";
}

void cmd_predict(const Common& c) {
  Run run = open_run("predict", c);
  const GaitModel m = GaitModel::from_json(run.read("model", run.input(c.model, "model.json")));
  const InputSchedule s = schedule_from_json(
      parse_json(run.read("schedule", run.input(c.schedule, "schedule.json")), "schedule"));
  const Prediction p = predict(m, s, run.cfg.dt);
  run.write("prediction", "prediction.csv", prediction_to_csv(p));
  run.finish();
  std::cerr << "predict: " << p.size() << " samples\n";
}

void cmd_evaluate(const Common& c) {
  Run run = open_run("evaluate", c);
  const Experiment ex = load_experiment(run, c);
  const PreparedData d = preprocess(ex, run.cfg.pipeline);
  const std::uint64_t seed = derive_seed(run.cfg.seed, "folds");
  const CrossValidation cv = cross_validate(d, run.cfg.pipeline, seed);
  const json report = {{"format", "gaitid-report"},
                       {"folds", run.cfg.pipeline.folds},
                       {"fold_seed", seed},
                       {"cross_validation", cross_validation_to_json(cv, true)}};
  run.write("report", "report.json", report.dump(1) + "\n");
  run.write("phase_error", "phase_error.csv", export_phase_error(report));
  run.finish({{"seeds", {{"folds", seed}}}});
  std::cout << "gamma_r_dot " << cv.mean_gamma_r_dot << " +- " << cv.std_gamma_r_dot << "\n"
            << "gamma_xi " << cv.mean_gamma_xi << " +- " << cv.std_gamma_xi << "\n";
}

void cmd_optimize(const Common& c) {
  Run run = open_run("optimize", c);
  const ExperimentConfig& cfg = run.cfg;
  const GaitModel m = GaitModel::from_json(run.read("model", run.input(c.model, "model.json")));
  double lambda = 0.0;
  if (cfg.iterate.lambda) {
    lambda = *cfg.iterate.lambda;
  } else {
    lambda = cfg.iterate.lambda_scale * typical_speed(load_experiment(run, c));
  }
  const ParamBox box = cfg.param_box();
  ObjectiveOptions oopts;
  oopts.lambda = lambda;
  oopts.dt = cfg.dt;
  oopts.warmup_cycles = cfg.iterate.objective_warmup_cycles;
  oopts.samples_per_cycle =
      static_cast<int>(std::ceil(period(from_vector(box.family, box.full_hi)) / cfg.dt - 1e-9));
  const ScalarFunction f = [&](const Eigen::VectorXd& x) {
    return objective_eval(m, from_vector(box.family, x), oopts).F;
  };
  const Eigen::VectorXd start = box.center();
  const OptimizeResult r = optimize_box(f, box, start, cfg.iterate.optimizer);
  const CycleParams opt = from_vector(box.family, r.x);
  const auto plant = cfg.make_plant();
  const json doc = {{"format", "gaitid-optimum"},
                    {"lambda", lambda},
                    {"lambda_auto", !cfg.iterate.lambda.has_value()},
                    {"box", box_to_json(box)},
                    {"start", std::vector<double>(start.data(), start.data() + start.size())},
                    {"search",
                     {{"iterations", r.iterations},
                      {"evaluations", r.evaluations},
                      {"converged", r.converged},
                      {"status", r.status},
                      {"trace", r.trace}}},
                    {"optimum", params_to_json(opt)},
                    {"predicted", objective_json(objective_eval(m, opt, oopts))},
                    {"verified", objective_json(verify_on_plant(*plant, opt, oopts))}};
  run.write("optimum", "optimum.json", doc.dump(1) + "\n");
  run.finish();
  std::cout << doc.at("optimum").dump() << "\n";
}

void cmd_iterate(const Common& c) {
  Run run = open_run("iterate", c);
  const auto plant = run.cfg.make_plant();
  const OptimizationHistory h =
      iterate_refine(*plant, run.cfg.param_box(), run.cfg.iterate, [](const IterationRecord& r) {
        std::cerr << "iteration " << r.iteration << ": verified F " << r.verified.F
                  << ", predicted F " << r.predicted.F << ", gamma_r_dot " << r.cv.mean_gamma_r_dot
                  << ", gamma_xi " << r.cv.mean_gamma_xi << "\n";
      });
  run.write("history", "history.json", history_to_json(h).dump(1) + "\n");
  run.finish();
}

void cmd_export(const std::string& kind, const std::string& input, const std::string& schedule,
                const std::string& output) {
  const fs::path in = artifact_path(input);
  if (!fs::exists(in)) throw MissingArtifact("export: missing artifact '" + in.string() + "'");
  const std::string text = read_text(in);
  std::string table;
  if (kind == "shape_space_loop") {
    table = export_shape_space_loop(trajectory_from_csv(text));
  } else if (kind == "input_cycles") {
    const fs::path sp = artifact_path(schedule.empty() ? (in.parent_path() / "schedule.json").string()
                                                       : schedule);
    if (!fs::exists(sp)) throw MissingArtifact("export: missing schedule '" + sp.string() + "'");
    table = export_input_cycles(trajectory_from_csv(text),
                                schedule_from_json(parse_json(read_text(sp), "schedule")));
  } else if (kind == "phase_error") {
    table = export_phase_error(parse_json(text, "report"));
  } else if (kind == "iteration_objective") {
    table = export_iteration_objective(parse_json(text, "history"));
  } else {
    throw InvalidArgument("export: unknown kind '" + kind + "'");
  }
  if (output.empty()) {
    std::cout << table;
  } else {
    write_text_atomic(artifact_path(output), table);
  }
}

void add_common(CLI::App* sub, Common& c, bool trajectory, bool schedule, bool model) {
  sub->add_option("--config", c.config, "Config document or run manifest");
  sub->add_option("--set", c.overrides, "Override a config key (a.b=value)")->take_all();
  sub->add_option("--out", c.out, "Artifact directory (relative to GAITID_ARTIFACT_ROOT)");
  if (trajectory) sub->add_option("--trajectory", c.trajectory, "Trajectory table");
  if (schedule) sub->add_option("--schedule", c.schedule, "Schedule document");
  if (model) sub->add_option("--model", c.model, "Model document");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-driven gait identification and optimization"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Common c;
  std::string kind, input, schedule, output;

  add_common(app.add_subcommand("simulate", "Simulate perturbed cycles on the plant"), c, false, false, false);
  add_common(app.add_subcommand("fit", "Fit the gait model to a trajectory"), c, true, true, false);
  add_common(app.add_subcommand("predict", "Predict the response to a schedule"), c, false, true, true);
  add_common(app.add_subcommand("evaluate", "Cross-validated improvement over baseline"), c, true, true, false);
  add_common(app.add_subcommand("optimize", "Optimize the cycle on a fitted model"), c, true, true, true);
  add_common(app.add_subcommand("iterate", "Sample, fit, optimize and shrink repeatedly"), c, false, false, false);
  CLI::App* ex = app.add_subcommand("export", "Write a plot table from an artifact");
  ex->add_option("--kind", kind, "shape_space_loop, input_cycles, phase_error, iteration_objective")
      ->required()
      ->check(CLI::IsMember({"shape_space_loop", "input_cycles", "phase_error", "iteration_objective"}));
  ex->add_option("--input", input, "Source artifact")->required();
  ex->add_option("--schedule", schedule, "Schedule document (input_cycles)");
  ex->add_option("--output", output, "Output file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (name == "simulate") cmd_simulate(c);
    else if (name == "fit") cmd_fit(c);
    else if (name == "predict") cmd_predict(c);
    else if (name == "evaluate") cmd_evaluate(c);
    else if (name == "optimize") cmd_optimize(c);
    else if (name == "iterate") cmd_iterate(c);
    else cmd_export(kind, input, schedule, output);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const MissingArtifact& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure in stage '" << e.stage() << "': " << e.what() << "\n";
    return 4;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace gaitid::cli

#include "gaitid/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace gaitid {

namespace {

using json = nlohmann::json;

void put(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  return out;
}

json vector_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

}  // namespace

std::filesystem::path artifact_path(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative()) {
    if (const char* root = std::getenv("GAITID_ARTIFACT_ROOT"); root && *root) {
      return std::filesystem::path(root) / p;
    }
  }
  return p;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifact("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw Error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string trajectory_to_csv(const Trajectory& tr, std::span<const double> phi) {
  const int n = tr.shape_dim();
  if (!phi.empty() && phi.size() != tr.size()) {
    throw InvalidArgument("trajectory_to_csv: phase length mismatch");
  }
  std::string out = "t,u";
  for (int i = 1; i <= n; ++i) out += ",r" + std::to_string(i);
  for (int i = 1; i <= n; ++i) out += ",rdot" + std::to_string(i);
  out += ",xi_x,xi_y,xi_theta,x,y,theta,phi\n";
  for (size_t k = 0; k < tr.size(); ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    put(out, tr.t[k]);
    out += ',';
    put(out, tr.u[k]);
    for (int i = 0; i < n; ++i) {
      out += ',';
      put(out, tr.r(row, i));
    }
    for (int i = 0; i < n; ++i) {
      out += ',';
      put(out, tr.r_dot(row, i));
    }
    for (double v : {tr.xi[k].vx, tr.xi[k].vy, tr.xi[k].omega, tr.g[k].x, tr.g[k].y, tr.g[k].theta,
                     phi.empty() ? std::nan("") : phi[k]}) {
      out += ',';
      put(out, v);
    }
    out += '\n';
  }
  return out;
}

Trajectory trajectory_from_csv(const std::string& text, std::vector<double>* phi) {
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line)) throw InvalidArgument("trajectory table: empty");
  const std::vector<std::string> header = split(line, ',');
  const int cols = static_cast<int>(header.size());
  const int n = (cols - 9) / 2;
  if (cols < 11 || (cols - 9) % 2 != 0 || header[0] != "t" || header[1] != "u" ||
      header.back() != "phi") {
    throw InvalidArgument("trajectory table: unexpected header");
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line, ',');
    if (static_cast<int>(cells.size()) != cols) {
      throw InvalidArgument("trajectory table: ragged row " + std::to_string(rows.size() + 2));
    }
    std::vector<double> v(cells.size());
    for (size_t i = 0; i < cells.size(); ++i) v[i] = std::strtod(cells[i].c_str(), nullptr);
    rows.push_back(std::move(v));
  }
  if (rows.size() < 2) throw InvalidArgument("trajectory table: fewer than two rows");
  Trajectory tr;
  const auto m = static_cast<Eigen::Index>(rows.size());
  tr.r.resize(m, n);
  tr.r_dot.resize(m, n);
  if (phi) phi->clear();
  for (size_t k = 0; k < rows.size(); ++k) {
    const std::vector<double>& v = rows[k];
    tr.t.push_back(v[0]);
    tr.u.push_back(v[1]);
    for (int i = 0; i < n; ++i) {
      tr.r(static_cast<Eigen::Index>(k), i) = v[static_cast<size_t>(2 + i)];
      tr.r_dot(static_cast<Eigen::Index>(k), i) = v[static_cast<size_t>(2 + n + i)];
    }
    const size_t b = static_cast<size_t>(2 + 2 * n);
    tr.xi.push_back({v[b], v[b + 1], v[b + 2]});
    tr.g.push_back({v[b + 3], v[b + 4], v[b + 5]});
    if (phi) phi->push_back(v[b + 6]);
  }
  tr.dt = tr.t[1] - tr.t[0];
  return tr;
}

std::string prediction_to_csv(const Prediction& p) {
  const auto n = p.r_hat.cols();
  std::string out = "t,u,phi";
  for (Eigen::Index i = 1; i <= n; ++i) out += ",r" + std::to_string(i);
  for (Eigen::Index i = 1; i <= n; ++i) out += ",rdot" + std::to_string(i);
  out += ",xi_x,xi_y,xi_theta,x,y,theta\n";
  for (size_t k = 0; k < p.size(); ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    put(out, p.t[k]);
    out += ',';
    put(out, p.u[k]);
    out += ',';
    put(out, p.phi[k]);
    for (Eigen::Index i = 0; i < n; ++i) {
      out += ',';
      put(out, p.r_hat(row, i));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      out += ',';
      put(out, p.r_dot_hat(row, i));
    }
    for (double v : {p.xi_hat[k].vx, p.xi_hat[k].vy, p.xi_hat[k].omega, p.g_hat[k].x, p.g_hat[k].y,
                     p.g_hat[k].theta}) {
      out += ',';
      put(out, v);
    }
    out += '\n';
  }
  return out;
}

json params_to_json(const CycleParams& p) {
  const WaveFamily f = family_of(p);
  const Eigen::VectorXd v = to_vector(p);
  json j;
  j["family"] = family_name(f);
  const auto& names = parameter_names(f);
  for (size_t i = 0; i < names.size(); ++i) j[names[i]] = v[static_cast<Eigen::Index>(i)];
  return j;
}

CycleParams params_from_json(const json& j) {
  const WaveFamily f = family_from_name(j.at("family").get<std::string>());
  const auto& names = parameter_names(f);
  Eigen::VectorXd v(static_cast<Eigen::Index>(names.size()));
  for (size_t i = 0; i < names.size(); ++i) v[static_cast<Eigen::Index>(i)] = j.at(names[i]).get<double>();
  return from_vector(f, v);
}

json box_to_json(const ParamBox& b) {
  return {{"family", family_name(b.family)},
          {"parameters", parameter_names(b.family)},
          {"lo", vector_json(b.lo)},
          {"hi", vector_json(b.hi)},
          {"full_lo", vector_json(b.full_lo)},
          {"full_hi", vector_json(b.full_hi)}};
}

json schedule_to_json(const InputSchedule& s, double dt) {
  json cycles = json::array();
  for (const CycleParams& p : s.cycles()) cycles.push_back(params_to_json(p));
  return {{"format", "gaitid-schedule"}, {"t0", s.start_time()}, {"dt", dt}, {"cycles", cycles}};
}

InputSchedule schedule_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != "gaitid-schedule") {
      throw InvalidArgument("schedule document: wrong format tag");
    }
    std::vector<CycleParams> cycles;
    for (const json& c : j.at("cycles")) cycles.push_back(params_from_json(c));
    return InputSchedule(std::move(cycles), j.at("t0").get<double>());
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("schedule document: ") + e.what());
  }
}

json cross_validation_to_json(const CrossValidation& cv, bool include_rows) {
  json folds = json::array();
  for (const FoldResult& f : cv.folds) {
    folds.push_back({{"fold", f.fold},
                     {"test_cycles", f.test_cycles},
                     {"samples", f.errors.samples},
                     {"gamma_r_dot", f.gamma_r_dot},
                     {"gamma_xi", f.gamma_xi},
                     {"error_r_dot_model", f.errors.r_dot_pred},
                     {"error_r_dot_baseline", f.errors.r_dot_base},
                     {"error_xi_model", f.errors.xi_pred},
                     {"error_xi_baseline", f.errors.xi_base},
                     {"error_xi_true_shapes", f.errors.xi_true_shapes}});
  }
  json j = {{"folds", folds},
            {"gamma_r_dot", {{"mean", cv.mean_gamma_r_dot}, {"std", cv.std_gamma_r_dot}}},
            {"gamma_xi", {{"mean", cv.mean_gamma_xi}, {"std", cv.std_gamma_xi}}}};
  if (include_rows) {
    json cols = {{"fold", json::array()},       {"cycle", json::array()},
                 {"phi", json::array()},        {"r_dot_model", json::array()},
                 {"r_dot_baseline", json::array()}, {"xi_model", json::array()},
                 {"xi_baseline", json::array()}};
    for (const PhaseErrorRow& r : cv.phase_errors) {
      cols["fold"].push_back(r.fold);
      cols["cycle"].push_back(r.cycle);
      cols["phi"].push_back(r.phi);
      cols["r_dot_model"].push_back(r.r_dot_pred);
      cols["r_dot_baseline"].push_back(r.r_dot_base);
      cols["xi_model"].push_back(r.xi_pred);
      cols["xi_baseline"].push_back(r.xi_base);
    }
    j["phase_error"] = std::move(cols);
  }
  return j;
}

json history_to_json(const OptimizationHistory& h) {
  json iters = json::array();
  for (const IterationRecord& r : h.iterations) {
    json sample_rows = json::array();
    for (const CycleParams& p : r.samples) sample_rows.push_back(vector_json(to_vector(p)));
    iters.push_back(
        {{"iteration", r.iteration},
         {"box", box_to_json(r.box)},
         {"sample_seed", r.sample_seed},
         {"cv_seed", r.cv_seed},
         {"samples", sample_rows},
         {"mean_sample_displacement", r.mean_sample_dx},
         {"start", vector_json(r.start)},
         {"search",
          {{"iterations", r.search.iterations},
           {"evaluations", r.search.evaluations},
           {"converged", r.search.converged},
           {"status", r.search.status},
           {"f_start", r.search.f0},
           {"f_best", r.search.f}}},
         {"optimum", params_to_json(r.optimum)},
         {"predicted", {{"F", r.predicted.F}, {"dx", r.predicted.dx}, {"t_cycle", r.predicted.t_cycle}}},
         {"verified", {{"F", r.verified.F}, {"dx", r.verified.dx}, {"t_cycle", r.verified.t_cycle}}},
         {"incumbent", params_to_json(r.incumbent)},
         {"incumbent_verified",
          {{"F", r.incumbent_verified.F},
           {"dx", r.incumbent_verified.dx},
           {"t_cycle", r.incumbent_verified.t_cycle}}},
         {"model_checksum", hex64(fnv1a64(r.model_json))},
         {"cross_validation", cross_validation_to_json(r.cv, false)}});
  }
  return {{"format", "gaitid-history"},
          {"lambda", h.lambda},
          {"lambda_auto", h.lambda_auto},
          {"iterations", iters}};
}

std::string export_shape_space_loop(const Trajectory& tr) {
  if (tr.shape_dim() < 2) throw InvalidArgument("shape_space_loop: needs two shape variables");
  std::string out = "t,r1,r2\n";
  for (size_t k = 0; k < tr.size(); ++k) {
    put(out, tr.t[k]);
    out += ',';
    put(out, tr.r(static_cast<Eigen::Index>(k), 0));
    out += ',';
    put(out, tr.r(static_cast<Eigen::Index>(k), 1));
    out += '\n';
  }
  return out;
}

std::string export_input_cycles(const Trajectory& tr, const InputSchedule& s) {
  std::string out = "cycle,tau,u,u_normalized\n";
  for (size_t k = 0; k < tr.size(); ++k) {
    const std::size_t c = s.cycle_at(tr.t[k]);
    const double tau = (tr.t[k] - s.starts()[c]) / s.durations()[c];
    const Eigen::VectorXd v = to_vector(s.cycles()[c]);
    const double lo = v[0];
    const double hi = v[1];
    out += std::to_string(c);
    out += ',';
    put(out, tau);
    out += ',';
    put(out, tr.u[k]);
    out += ',';
    put(out, (tr.u[k] - lo) / (hi - lo));
    out += '\n';
  }
  return out;
}

std::string export_phase_error(const json& report) {
  if (!report.contains("cross_validation") ||
      !report.at("cross_validation").contains("phase_error")) {
    throw InvalidArgument("phase_error export needs an evaluation report");
  }
  const json& c = report.at("cross_validation").at("phase_error");
  std::string out = "fold,cycle,phi,r_dot_model,r_dot_baseline,xi_model,xi_baseline\n";
  const size_t n = c.at("phi").size();
  for (size_t i = 0; i < n; ++i) {
    out += std::to_string(c.at("fold")[i].get<int>()) + ',' +
           std::to_string(c.at("cycle")[i].get<int>());
    for (const char* key : {"phi", "r_dot_model", "r_dot_baseline", "xi_model", "xi_baseline"}) {
      out += ',';
      put(out, c.at(key)[i].get<double>());
    }
    out += '\n';
  }
  return out;
}

std::string export_iteration_objective(const json& history) {
  if (!history.contains("format") || history.at("format") != "gaitid-history") {
    throw InvalidArgument("iteration_objective export needs an optimizer history");
  }
  std::string out = "iteration,mean_displacement,gamma_r_dot,gamma_xi\n";
  for (const json& it : history.at("iterations")) {
    out += std::to_string(it.at("iteration").get<int>());
    out += ',';
    put(out, it.at("mean_sample_displacement").get<double>());
    out += ',';
    put(out, it.at("cross_validation").at("gamma_r_dot").at("mean").get<double>());
    out += ',';
    put(out, it.at("cross_validation").at("gamma_xi").at("mean").get<double>());
    out += '\n';
  }
  return out;
}

}  // namespace gaitid

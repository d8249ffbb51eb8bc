// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The clns Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "clns/experiment.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <thread>

#include "clns/baselines.hpp"
#include "clns/metrics_io.hpp"

namespace clns {

using nlohmann::json;

namespace {

// Collects every problem found while reading a JSON configuration.
class ConfigReader {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

  void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, _] : obj.items()) {
      if (!allowed.count(k)) fail(path.empty() ? k : path + "." + k, "unknown field");
    }
  }

  bool object(const json& parent, const char* key, const std::string& path, bool required) {
    if (!parent.contains(key)) {
      if (required) fail(path, "missing required field");
      return false;
    }
    if (!parent.at(key).is_object()) {
      fail(path, "expected an object");
      return false;
    }
    return true;
  }

  void count(const json& obj, const char* key, const std::string& path, std::size_t& out) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (v.is_number_unsigned()) {
      out = v.get<std::size_t>();
    } else if (v.is_number_integer() && v.get<long long>() >= 0) {
      out = static_cast<std::size_t>(v.get<long long>());
    } else {
      fail(path, "expected a non-negative integer");
    }
  }

  void seed(const json& obj, const char* key, const std::string& path, std::uint64_t& out) {
    std::size_t tmp = out;
    const auto before = errors.size();
    count(obj, key, path, tmp);
    if (errors.size() == before) out = tmp;
  }

  void real(const json& obj, const char* key, const std::string& path, double& out) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (v.is_number()) {
      out = v.get<double>();
    } else {
      fail(path, "expected a number");
    }
  }

  // Accepts a number or the string "inf".
  void extended_real(const json& obj, const char* key, const std::string& path, double& out) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (v.is_number()) {
      out = v.get<double>();
    } else if (v.is_string() && v.get<std::string>() == "inf") {
      out = std::numeric_limits<double>::infinity();
    } else {
      fail(path, "expected a number or \"inf\"");
    }
  }

  template <typename T, std::size_t N>
  void array(const json& obj, const char* key, const std::string& path, std::array<T, N>& out) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (!v.is_array() || v.size() != N) {
      fail(path, "expected an array of " + std::to_string(N) + " numbers");
      return;
    }
    std::array<T, N> tmp{};
    for (std::size_t i = 0; i < N; ++i) {
      const auto& e = v[i];
      if constexpr (std::is_integral_v<T>) {
        if (!(e.is_number_unsigned() || (e.is_number_integer() && e.get<long long>() >= 0))) {
          fail(path, "expected non-negative integers");
          return;
        }
      } else if (!e.is_number()) {
        fail(path, "expected numbers");
        return;
      }
      tmp[i] = e.get<T>();
    }
    out = tmp;
  }

  void real_list(const json& obj, const char* key, const std::string& path, std::vector<double>& out) {
    if (!obj.contains(key)) {
      fail(path, "missing required field");
      return;
    }
    const auto& v = obj.at(key);
    if (!v.is_array()) {
      fail(path, "expected an array of numbers");
      return;
    }
    for (const auto& e : v) {
      if (!e.is_number()) {
        fail(path, "expected an array of numbers");
        return;
      }
      out.push_back(e.get<double>());
    }
  }

  void complex_amplitude(const json& obj, const char* key, const std::string& path, Complex& out) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (v.is_number()) {
      out = Complex(v.get<double>(), 0.0);
    } else if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
      out = Complex(v[0].get<double>(), v[1].get<double>());
    } else {
      fail(path, "expected a number or [re, im]");
    }
  }
};

json extended_real_json(double x) {
  if (x == std::numeric_limits<double>::infinity()) return "inf";
  return x;
}

std::string shortest(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  out.close();
  if (!out) throw IoError("write failed: " + path.string());
}

void write_views(const CVector& volume, const GridDims& grid, const std::filesystem::path& dir,
                 const std::string& stem) {
  const VolumeViews views = project_views(volume, grid);
  write_view_pgm(views.top, dir / (stem + "_top.pgm"));
  write_view_pgm(views.front, dir / (stem + "_front.pgm"));
  write_view_pgm(views.side, dir / (stem + "_side.pgm"));
}

void score(MethodRun& run, const Problem& problem, double rel_threshold) {
  if (problem.u_true.squaredNorm() > 0.0) run.nmse = nmse(run.estimate, problem.u_true);
  const SupportMetrics sm = support_metrics(run.estimate, problem.u_true, rel_threshold);
  run.precision = sm.precision;
  run.recall = sm.recall;
}

// Runs one method; `trace_path` (optional) receives trace rows as they are produced.
MethodRun run_method(const ExperimentConfig& config, const Problem& problem, Method method,
                     const AdmmParams& admm_params, const std::string& name,
                     const std::optional<std::filesystem::path>& trace_path, std::size_t workers) {
  using clock = std::chrono::steady_clock;
  MethodRun run;
  run.name = name;
  run.method = method;
  const auto t0 = clock::now();
  switch (method) {
    case Method::admm: {
      run.lambda = admm_params.lambda;
      run.rho = admm_params.rho;
      run.blocks = config.admm.blocks;
      std::optional<TraceCsvWriter> writer;
      if (trace_path) writer.emplace(*trace_path);
      SolveOptions opts;
      opts.workers = workers;
      if (writer) opts.on_iteration = [&writer](const TraceRecord& r) { writer->append(r); };
      AdmmResult res = solve_consensus_lasso(problem.H, problem.g, admm_params, config.admm.blocks, opts);
      if (writer) writer->close();
      run.estimate = std::move(res.v);
      run.trace = std::move(res.trace);
      run.converged = res.converged;
      run.final_objective = run.trace.back().objective;
      break;
    }
    case Method::fista: {
      run.lambda = config.fista.lambda;
      FistaResult res = solve_fista(problem.H, problem.g, config.fista.lambda, config.fista.max_iter, config.fista.tol);
      run.estimate = std::move(res.u);
      run.trace = std::move(res.trace);
      run.final_objective = run.trace.empty() ? evaluate_objective(problem.H, problem.g, run.estimate, *run.lambda)
                                              : run.trace.back().objective;
      if (trace_path) write_trace_csv(run.trace, *trace_path);
      break;
    }
    case Method::pinv: {
      run.estimate = solve_pseudoinverse(problem.H, problem.g, config.pinv.trunc_rel_tol);
      // Scored with the ADMM weight so the rows are comparable.
      run.final_objective = evaluate_objective(problem.H, problem.g, run.estimate, config.admm.params.lambda);
      break;
    }
  }
  run.wall_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  run.iterations = run.trace.size();
  score(run, problem, config.support_rel_threshold);
  return run;
}

json metrics_json(const MethodRun& run) {
  json j;
  j["method"] = to_string(run.method);
  j["nmse"] = run.nmse ? json(*run.nmse) : json(nullptr);
  j["precision"] = run.precision;
  j["recall"] = run.recall;
  j["wall_seconds"] = run.wall_seconds;
  j["iterations"] = run.iterations;
  j["final_objective"] = run.final_objective;
  j["lambda"] = run.lambda ? json(*run.lambda) : json(nullptr);
  j["rho"] = run.rho ? json(*run.rho) : json(nullptr);
  j["blocks"] = run.blocks ? json(*run.blocks) : json(nullptr);
  j["converged"] = run.converged;
  return j;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

std::vector<Target> default_targets(const GridDims& grid) {
  const std::array<std::size_t, 3> n{grid.nx, grid.ny, grid.nz};
  std::array<std::size_t, 3> size{};
  for (std::size_t a = 0; a < 3; ++a) size[a] = std::min<std::size_t>(a < 2 ? 2 : 1, n[a]);
  auto place = [&](std::size_t axis, std::size_t quarter) {
    const std::size_t want = n[axis] * quarter / 4;
    return std::min(want, n[axis] - size[axis]);
  };
  std::vector<Target> targets;
  for (std::size_t qy : {1, 3})
    for (std::size_t qx : {1, 3}) {
      Target t;
      t.box.origin = {place(0, qx), place(1, qy), std::min(n[2] / 2, n[2] - size[2])};
      t.box.size = size;
      targets.push_back(t);
    }
  return targets;
}

ExperimentConfig parse_experiment_config(const json& j) {
  ConfigReader rd;
  ExperimentConfig cfg;
  if (!j.is_object()) throw ValidationError({"<root>: expected a JSON object"});
  rd.only_keys(j, "", {"scenario", "targets", "admm", "fista", "pinv", "sweep", "metrics", "output_dir"});

  if (rd.object(j, "scenario", "scenario", true)) {
    const auto& s = j.at("scenario");
    rd.only_keys(s, "scenario",
                 {"n_theta", "n_freq", "grid", "voxel_size_l", "roi_offset_z0", "roi_extent", "center_freq_hz",
                  "bandwidth_hz", "rng_seed", "snr_db"});
    auto& sc = cfg.scenario;
    rd.count(s, "n_theta", "scenario.n_theta", sc.n_theta);
    rd.count(s, "n_freq", "scenario.n_freq", sc.n_freq);
    std::array<std::size_t, 3> grid{sc.grid.nx, sc.grid.ny, sc.grid.nz};
    rd.array(s, "grid", "scenario.grid", grid);
    sc.grid = {grid[0], grid[1], grid[2]};
    rd.real(s, "voxel_size_l", "scenario.voxel_size_l", sc.voxel_size_l);
    rd.real(s, "roi_offset_z0", "scenario.roi_offset_z0", sc.roi_offset_z0);
    rd.array(s, "roi_extent", "scenario.roi_extent", sc.roi_extent);
    rd.real(s, "center_freq_hz", "scenario.center_freq_hz", sc.center_freq_hz);
    rd.real(s, "bandwidth_hz", "scenario.bandwidth_hz", sc.bandwidth_hz);
    rd.seed(s, "rng_seed", "scenario.rng_seed", sc.rng_seed);
    rd.extended_real(s, "snr_db", "scenario.snr_db", sc.snr_db);
    for (auto& v : sc.violations()) rd.errors.push_back(std::move(v));
  }

  if (j.contains("targets")) {
    const auto& t = j.at("targets");
    if (!t.is_array()) {
      rd.fail("targets", "expected an array");
    } else {
      for (std::size_t i = 0; i < t.size(); ++i) {
        const std::string path = "targets[" + std::to_string(i) + "]";
        if (!t[i].is_object()) {
          rd.fail(path, "expected an object");
          continue;
        }
        rd.only_keys(t[i], path, {"origin", "size", "amplitude"});
        Target target;
        rd.array(t[i], "origin", path + ".origin", target.box.origin);
        rd.array(t[i], "size", path + ".size", target.box.size);
        rd.complex_amplitude(t[i], "amplitude", path + ".amplitude", target.amplitude);
        const std::array<std::size_t, 3> n{cfg.scenario.grid.nx, cfg.scenario.grid.ny, cfg.scenario.grid.nz};
        for (std::size_t a = 0; a < 3; ++a) {
          if (target.box.size[a] == 0 || target.box.origin[a] >= n[a] ||
              target.box.size[a] > n[a] - target.box.origin[a]) {
            rd.fail(path, "box leaves the grid along axis " + std::to_string(a));
            break;
          }
        }
        if (!std::isfinite(target.amplitude.real()) || !std::isfinite(target.amplitude.imag())) {
          rd.fail(path + ".amplitude", "must be finite");
        }
        cfg.targets.push_back(target);
      }
    }
  } else {
    cfg.targets = default_targets(cfg.scenario.grid);
  }

  if (rd.object(j, "admm", "admm", false)) {
    const auto& a = j.at("admm");
    rd.only_keys(a, "admm", {"lambda", "rho", "max_iter", "eps_abs", "eps_rel", "blocks"});
    auto& p = cfg.admm.params;
    rd.real(a, "lambda", "admm.lambda", p.lambda);
    rd.real(a, "rho", "admm.rho", p.rho);
    rd.count(a, "max_iter", "admm.max_iter", p.max_iter);
    rd.real(a, "eps_abs", "admm.eps_abs", p.eps_abs);
    rd.real(a, "eps_rel", "admm.eps_rel", p.eps_rel);
    rd.count(a, "blocks", "admm.blocks", cfg.admm.blocks);
  }
  for (auto& v : cfg.admm.params.violations()) rd.errors.push_back(std::move(v));
  const std::size_t n_rows = cfg.scenario.n_measurements();
  if (cfg.admm.blocks < 1 || cfg.admm.blocks > n_rows) {
    rd.fail("admm.blocks", "must lie in [1, " + std::to_string(n_rows) + "]");
  }

  cfg.fista.lambda = cfg.admm.params.lambda;
  if (rd.object(j, "fista", "fista", false)) {
    const auto& f = j.at("fista");
    rd.only_keys(f, "fista", {"lambda", "max_iter", "tol"});
    rd.real(f, "lambda", "fista.lambda", cfg.fista.lambda);
    rd.count(f, "max_iter", "fista.max_iter", cfg.fista.max_iter);
    rd.real(f, "tol", "fista.tol", cfg.fista.tol);
  }
  if (!std::isfinite(cfg.fista.lambda) || cfg.fista.lambda < 0.0) rd.fail("fista.lambda", "must be finite and >= 0");
  if (cfg.fista.max_iter < 1) rd.fail("fista.max_iter", "must be >= 1");
  if (!std::isfinite(cfg.fista.tol) || cfg.fista.tol < 0.0) rd.fail("fista.tol", "must be finite and >= 0");

  if (rd.object(j, "pinv", "pinv", false)) {
    const auto& p = j.at("pinv");
    rd.only_keys(p, "pinv", {"trunc_rel_tol"});
    rd.real(p, "trunc_rel_tol", "pinv.trunc_rel_tol", cfg.pinv.trunc_rel_tol);
  }
  if (!(cfg.pinv.trunc_rel_tol > 0.0 && cfg.pinv.trunc_rel_tol < 1.0)) {
    rd.fail("pinv.trunc_rel_tol", "must lie in (0, 1)");
  }

  if (rd.object(j, "sweep", "sweep", false)) {
    const auto& s = j.at("sweep");
    rd.only_keys(s, "sweep", {"lambda", "rho"});
    SweepSettings sw;
    rd.real_list(s, "lambda", "sweep.lambda", sw.lambdas);
    rd.real_list(s, "rho", "sweep.rho", sw.rhos);
    if (s.contains("lambda") && sw.lambdas.empty()) rd.fail("sweep.lambda", "must be nonempty");
    if (s.contains("rho") && sw.rhos.empty()) rd.fail("sweep.rho", "must be nonempty");
    for (double l : sw.lambdas)
      if (!std::isfinite(l) || l < 0.0) rd.fail("sweep.lambda", "values must be finite and >= 0");
    for (double r : sw.rhos)
      if (!std::isfinite(r) || r <= 0.0) rd.fail("sweep.rho", "values must be finite and > 0");
    cfg.sweep = std::move(sw);
  }

  if (rd.object(j, "metrics", "metrics", false)) {
    const auto& m = j.at("metrics");
    rd.only_keys(m, "metrics", {"support_rel_threshold"});
    rd.real(m, "support_rel_threshold", "metrics.support_rel_threshold", cfg.support_rel_threshold);
  }
  if (!(cfg.support_rel_threshold > 0.0 && cfg.support_rel_threshold < 1.0)) {
    rd.fail("metrics.support_rel_threshold", "must lie in (0, 1)");
  }

  if (j.contains("output_dir")) {
    if (!j.at("output_dir").is_string() || j.at("output_dir").get<std::string>().empty()) {
      rd.fail("output_dir", "expected a nonempty string");
    } else {
      cfg.output_dir = j.at("output_dir").get<std::string>();
    }
  }

  if (!rd.errors.empty()) throw ValidationError(std::move(rd.errors));
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError({path.string() + ": not valid JSON (" + e.what() + ")"});
  }
  return parse_experiment_config(j);
}

json to_json(const ExperimentConfig& c) {
  const auto& s = c.scenario;
  json j;
  j["scenario"] = {{"n_theta", s.n_theta},
                   {"n_freq", s.n_freq},
                   {"grid", {s.grid.nx, s.grid.ny, s.grid.nz}},
                   {"voxel_size_l", s.voxel_size_l},
                   {"roi_offset_z0", s.roi_offset_z0},
                   {"roi_extent", s.roi_extent},
                   {"center_freq_hz", s.center_freq_hz},
                   {"bandwidth_hz", s.bandwidth_hz},
                   {"rng_seed", s.rng_seed},
                   {"snr_db", extended_real_json(s.snr_db)}};
  json targets = json::array();
  for (const auto& t : c.targets) {
    targets.push_back({{"origin", t.box.origin},
                       {"size", t.box.size},
                       {"amplitude", {t.amplitude.real(), t.amplitude.imag()}}});
  }
  j["targets"] = targets;
  const auto& p = c.admm.params;
  j["admm"] = {{"lambda", p.lambda}, {"rho", p.rho},         {"max_iter", p.max_iter},
               {"eps_abs", p.eps_abs}, {"eps_rel", p.eps_rel}, {"blocks", c.admm.blocks}};
  j["fista"] = {{"lambda", c.fista.lambda}, {"max_iter", c.fista.max_iter}, {"tol", c.fista.tol}};
  j["pinv"] = {{"trunc_rel_tol", c.pinv.trunc_rel_tol}};
  if (c.sweep) j["sweep"] = {{"lambda", c.sweep->lambdas}, {"rho", c.sweep->rhos}};
  j["metrics"] = {{"support_rel_threshold", c.support_rel_threshold}};
  j["output_dir"] = c.output_dir.string();
  return j;
}

std::string to_string(Method m) {
  switch (m) {
    case Method::admm:
      return "admm";
    case Method::fista:
      return "fista";
    case Method::pinv:
      return "pinv";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "admm") return Method::admm;
  if (name == "fista") return Method::fista;
  if (name == "pinv") return Method::pinv;
  throw ValidationError({"method: unknown method \"" + name + "\" (expected admm, fista or pinv)"});
}

Problem cmd_generate(const ExperimentConfig& config, const std::filesystem::path& out_dir, std::size_t workers) {
  const std::size_t threads = workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : workers;
  Problem problem;
  SensingMatrix H = synthesize_sensing_matrix(config.scenario, threads);
  const Scene scene = build_phantom(config.scenario, config.targets);
  const Measurement meas = forward_measure(H, scene, config.scenario.snr_db, config.scenario.rng_seed);
  problem.H = std::move(H.entries);
  problem.u_true = scene.reflectivity;
  problem.g = meas.g;

  std::filesystem::create_directories(out_dir);
  write_matrix(out_dir / "H.clnsmat", problem.H);
  write_vector(out_dir / "u_true.clnsvec", problem.u_true);
  write_vector(out_dir / "g.clnsvec", problem.g);
  write_views(problem.u_true, config.scenario.grid, out_dir, "truth");

  json manifest;
  manifest["config"] = to_json(config);
  manifest["measurements"] = problem.H.rows();
  manifest["pixels"] = problem.H.cols();
  manifest["frequencies_hz"] = config.scenario.frequencies();
  manifest["noise_power"] = meas.noise_power;
  manifest["realized_snr_db"] = extended_real_json(meas.realized_snr_db);
  manifest["support_size"] = scene.support().size();
  manifest["files"] = {{"H", "H.clnsmat"}, {"u_true", "u_true.clnsvec"}, {"g", "g.clnsvec"}};
  write_json(out_dir / "manifest.json", manifest);
  return problem;
}

Problem load_problem(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  Problem p;
  p.H = read_matrix(out_dir / "H.clnsmat");
  p.u_true = read_vector(out_dir / "u_true.clnsvec");
  p.g = read_vector(out_dir / "g.clnsvec");
  const auto rows = static_cast<Eigen::Index>(config.scenario.n_measurements());
  const auto cols = static_cast<Eigen::Index>(config.scenario.n_pixels());
  if (p.H.rows() != rows || p.H.cols() != cols || p.g.size() != rows || p.u_true.size() != cols) {
    throw ShapeError("files in " + out_dir.string() + " do not match the configured " + std::to_string(rows) + "x" +
                     std::to_string(cols) + " scenario; rerun generate");
  }
  return p;
}

MethodRun cmd_solve(const ExperimentConfig& config, Method method, const std::filesystem::path& out_dir,
                    std::size_t workers) {
  const Problem problem = load_problem(config, out_dir);
  const std::string stem = to_string(method);
  std::optional<std::filesystem::path> trace_path;
  if (method != Method::pinv) trace_path = out_dir / ("trace_" + stem + ".csv");
  MethodRun run = run_method(config, problem, method, config.admm.params, stem, trace_path, workers);
  write_vector(out_dir / ("estimate_" + stem + ".clnsvec"), run.estimate);
  write_views(run.estimate, config.scenario.grid, out_dir, stem);
  write_json(out_dir / ("metrics_" + stem + ".json"), metrics_json(run));
  return run;
}

std::vector<MethodRun> cmd_compare(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                   std::size_t workers) {
  const Problem problem = load_problem(config, out_dir);

  struct Job {
    Method method;
    AdmmParams params;
    std::string name;
  };
  std::vector<Job> jobs;
  if (config.sweep) {
    for (double l : config.sweep->lambdas)
      for (double r : config.sweep->rhos) {
        AdmmParams p = config.admm.params;
        p.lambda = l;
        p.rho = r;
        jobs.push_back({Method::admm, p, "admm_lambda" + shortest(l) + "_rho" + shortest(r)});
      }
  } else {
    jobs.push_back({Method::admm, config.admm.params, "admm"});
  }
  jobs.push_back({Method::fista, config.admm.params, "fista"});
  jobs.push_back({Method::pinv, config.admm.params, "pinv"});

  std::vector<MethodRun> runs;
  for (const auto& job : jobs) {
    std::optional<std::filesystem::path> trace_path;
    if (job.method != Method::pinv) trace_path = out_dir / ("trace_" + job.name + ".csv");
    try {
      MethodRun run = run_method(config, problem, job.method, job.params, job.name, trace_path, workers);
      write_vector(out_dir / ("estimate_" + job.name + ".clnsvec"), run.estimate);
      runs.push_back(std::move(run));
    } catch (const std::exception& e) {
      MethodRun failed;
      failed.name = job.name;
      failed.method = job.method;
      if (job.method == Method::admm) {
        failed.lambda = job.params.lambda;
        failed.rho = job.params.rho;
        failed.blocks = config.admm.blocks;
      } else if (job.method == Method::fista) {
        failed.lambda = config.fista.lambda;
      }
      failed.error = e.what();
      runs.push_back(std::move(failed));
    }
  }

  std::ofstream csv(out_dir / "summary.csv", std::ios::trunc);
  if (!csv) throw IoError("cannot open " + (out_dir / "summary.csv").string() + " for writing");
  csv << kSummaryCsvHeader << '\n';
  auto opt_real = [](const std::optional<double>& x) { return x ? format_real(*x) : std::string(); };
  for (const auto& r : runs) {
    const bool ok = r.error.empty();
    csv << to_string(r.method) << ',' << opt_real(r.lambda) << ',' << opt_real(r.rho) << ','
        << (r.blocks ? std::to_string(*r.blocks) : std::string()) << ',';
    if (ok) {
      csv << r.iterations << ',' << format_real(r.final_objective) << ',' << opt_real(r.nmse) << ','
          << format_real(r.precision) << ',' << format_real(r.recall) << ',' << format_real(r.wall_seconds) << ",ok";
    } else {
      csv << ",,,,,," << csv_field("error: " + r.error);
    }
    csv << '\n';
  }
  csv.close();
  if (!csv) throw IoError("write failed: " + (out_dir / "summary.csv").string());
  return runs;
}

}  // namespace clns

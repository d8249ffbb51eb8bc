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

#pragma once

// Experiment workflow behind the `clns` command line tool: JSON configuration,
// problem generation, single-method solves and method comparisons.
//
// Files in an output directory:
//   generate: H.clnsmat, u_true.clnsvec, g.clnsvec, truth_{top,front,side}.pgm, manifest.json
//   solve:    estimate_<m>.clnsvec, trace_<m>.csv (admm, fista), <m>_{top,front,side}.pgm, metrics_<m>.json
//   compare:  estimate_<run>.clnsvec, trace_<run>.csv, summary.csv

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "clns/consensus_admm.hpp"
#include "clns/scene_forward.hpp"

namespace clns {

struct AdmmSettings {
  AdmmParams params;
  std::size_t blocks = 31;
};

struct FistaSettings {
  double lambda = 0.01;
  std::size_t max_iter = 500;
  double tol = 1e-10;
};

struct PinvSettings {
  double trunc_rel_tol = 1e-10;
};

struct SweepSettings {
  std::vector<double> lambdas;
  std::vector<double> rhos;
};

struct ExperimentConfig {
  ScenarioConfig scenario;
  std::vector<Target> targets;
  AdmmSettings admm;
  FistaSettings fista;
  PinvSettings pinv;
  std::optional<SweepSettings> sweep;
  double support_rel_threshold = 0.2;
  std::filesystem::path output_dir = "out";
};

/// Four 2x2x1 unit-amplitude boxes, one per (x, y) quadrant, in the middle z layer.
std::vector<Target> default_targets(const GridDims& grid);

/// Builds a configuration from JSON. "scenario" is required; every other field
/// falls back to its default. Throws ValidationError naming every bad field.
ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

enum class Method { admm, fista, pinv };

std::string to_string(Method m);
/// Throws ValidationError for unknown names.
Method parse_method(const std::string& name);

struct Problem {
  CMatrix H;
  CVector u_true;
  CVector g;
};

struct MethodRun {
  std::string name;  // file stem, e.g. "admm" or "admm_lambda0.01_rho1"
  Method method = Method::admm;
  std::optional<double> lambda;
  std::optional<double> rho;
  std::optional<std::size_t> blocks;
  std::size_t iterations = 0;
  double final_objective = 0.0;
  std::optional<double> nmse;  // empty when the ground truth is zero
  double precision = 0.0;
  double recall = 0.0;
  double wall_seconds = 0.0;
  bool converged = false;
  std::string error;  // nonempty when the run failed
  CVector estimate;
  ConvergenceTrace trace;
};

/// Writes the generated problem into `out_dir` and returns it.
Problem cmd_generate(const ExperimentConfig& config, const std::filesystem::path& out_dir, std::size_t workers);

/// Reads a problem written by cmd_generate, checking it against the configuration.
Problem load_problem(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// Runs one method and writes its estimate, trace, views and metrics. Solver
/// failures propagate.
MethodRun cmd_solve(const ExperimentConfig& config, Method method, const std::filesystem::path& out_dir,
                    std::size_t workers);

/// Runs ADMM (once, or once per sweep pair), FISTA and the pseudoinverse and
/// writes summary.csv. A failing run is reported in its row and does not stop
/// the others.
std::vector<MethodRun> cmd_compare(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                   std::size_t workers);

inline constexpr const char* kSummaryCsvHeader =
    "method,lambda,rho,N,iterations,final_objective,nmse,precision,recall,wall_seconds,status";

}  // namespace clns

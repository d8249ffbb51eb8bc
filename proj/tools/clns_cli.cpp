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

// clns: generate a compressive-antenna imaging scenario, reconstruct it with
// consensus ADMM, FISTA or the pseudoinverse, and compare the methods.
//
// Exit status: 0 success, 2 invalid configuration, 3 solver failure, 1 other errors.

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"

#include "clns/experiment.hpp"

namespace {

constexpr int kExitOther = 1;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

void print_run(const clns::MethodRun& r) {
  std::printf("%-28s iters=%-6zu objective=%-14.6g nmse=%-12s precision=%.3f recall=%.3f time=%.3fs%s\n",
              r.name.c_str(), r.iterations, r.final_objective,
              r.nmse ? std::to_string(*r.nmse).c_str() : "n/a", r.precision, r.recall, r.wall_seconds,
              r.error.empty() ? "" : ("  ERROR: " + r.error).c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consensus ADMM imaging with a compressive reflector antenna model"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output;
  std::size_t workers = 0;
  std::string method_name;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Experiment configuration (JSON)")->required();
    cmd->add_option("--output", output, "Output directory (overrides output_dir in the config)");
    cmd->add_option("--workers", workers, "Worker threads, 0 = machine parallelism")->capture_default_str();
  };

  auto* generate = app.add_subcommand("generate", "Synthesize H, the phantom and the measurements");
  add_common(generate);
  auto* solve = app.add_subcommand("solve", "Reconstruct with one method");
  add_common(solve);
  solve->add_option("--method", method_name, "admm | fista | pinv")->required();
  auto* compare = app.add_subcommand("compare", "Run every method (and the lambda/rho sweep) and summarize");
  add_common(compare);

  CLI11_PARSE(app, argc, argv);

  try {
    clns::ExperimentConfig config = clns::load_experiment_config(config_path);
    const std::filesystem::path out_dir = output.empty() ? config.output_dir : std::filesystem::path(output);

    if (generate->parsed()) {
      const auto problem = clns::cmd_generate(config, out_dir, workers);
      std::printf("wrote %lldx%lld problem to %s\n", static_cast<long long>(problem.H.rows()),
                  static_cast<long long>(problem.H.cols()), out_dir.c_str());
    } else if (solve->parsed()) {
      const clns::Method method = clns::parse_method(method_name);
      print_run(clns::cmd_solve(config, method, out_dir, workers));
    } else if (compare->parsed()) {
      const auto runs = clns::cmd_compare(config, out_dir, workers);
      for (const auto& r : runs) print_run(r);
      std::printf("summary: %s\n", (out_dir / "summary.csv").c_str());
    }
  } catch (const clns::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return kExitValidation;
  } catch (const clns::NumericError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return 0;
}

// Copyright 2026 The attnfuse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// attnfuse command-line driver.
//
//   attnfuse {generate|train|eval|sweep} --config <path> [--seed N] [--out DIR]
//
// Exit codes: 0 success, 2 configuration error, 3 I/O or format error.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "attnfuse/errors.h"
#include "attnfuse/harness/harness.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

void AddCommonFlags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "Experiment config (JSON)")->required();
  cmd->add_option("--seed", flags.seed, "Override the config seed");
  cmd->add_option("--out", flags.out, "Override the output directory");
}

attnfuse::harness::ExperimentConfig Resolve(const CommonFlags& flags) {
  attnfuse::harness::ExperimentConfig config =
      attnfuse::harness::LoadExperimentConfig(flags.config);
  if (flags.seed) config.seed = *flags.seed;
  if (flags.out) config.out_dir = *flags.out;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attention-based fusion of per-task uncertainty maps"};
  app.require_subcommand(1);
  CommonFlags flags;
  CLI::App* generate = app.add_subcommand("generate", "Generate train, test and shifted test data");
  CLI::App* train = app.add_subcommand("train", "Train the attention model");
  CLI::App* eval = app.add_subcommand("eval", "Evaluate a checkpoint against the raw baseline");
  CLI::App* sweep = app.add_subcommand("sweep", "Train and evaluate one model per axis value");
  for (CLI::App* cmd : {generate, train, eval, sweep}) AddCommonFlags(cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const attnfuse::harness::ExperimentConfig config = Resolve(flags);
    if (generate->parsed()) {
      attnfuse::harness::Generate(config, std::cerr);
    } else if (train->parsed()) {
      const auto outcome = attnfuse::harness::TrainModel(config, std::cerr);
      std::cout << outcome.checkpoint.string() << "\n";
    } else if (eval->parsed()) {
      for (const auto& row : attnfuse::harness::Evaluate(config, std::cerr)) {
        std::cout << row.split << " " << attnfuse::metrics::SourceName(row.source) << " zncc "
                  << attnfuse::metrics::FormatMetric(row.report.mean_zncc) << "\n";
      }
    } else if (sweep->parsed()) {
      std::cout << attnfuse::harness::SweepCsv(
          config.sweep_axis, attnfuse::harness::Sweep(config, config.sweep_axis, std::cerr));
    }
  } catch (const attnfuse::UsageError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const attnfuse::ShapeError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const attnfuse::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const attnfuse::FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

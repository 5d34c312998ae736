// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "moher/io.hpp"

namespace moher::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

struct SynthArgs {
  std::filesystem::path out;
};

struct GraphArgs {
  std::filesystem::path data;
  std::string target;
  long long slot = -1;
  std::string pool = "all";
  std::filesystem::path out;
};

struct TrainArgs {
  std::filesystem::path data;
  std::filesystem::path out;
};

struct EvaluateArgs {
  std::filesystem::path data;
  std::filesystem::path checkpoint;
  std::string baselines = "na_ha,na_lstm";
  std::string split = "test";
  std::filesystem::path out;
  std::filesystem::path predictions;
  std::filesystem::path labels;
};

struct PredictArgs {
  std::filesystem::path data;
  std::filesystem::path checkpoint;
  std::string mode;
  double x_km = 0.0;
  double y_km = 0.0;
  std::string poi;
  long long slot = -1;
  std::string name = "new_site";
};

struct GradcheckArgs {
  std::size_t instances = 20;
  std::size_t max_nodes = 8;
};

struct GridArgs {
  std::filesystem::path data;
  std::filesystem::path out;
};

int run_synth(const io::RunConfig& config, const SynthArgs& args);
int run_build_graphs(const io::RunConfig& config, const GraphArgs& args);
int run_train(const io::RunConfig& config, const TrainArgs& args);
int run_evaluate(const io::RunConfig& config, const EvaluateArgs& args);
int run_predict(const io::RunConfig& config, const PredictArgs& args);
int run_gradcheck(const io::RunConfig& config, const GradcheckArgs& args);
int run_grid(const io::RunConfig& config, const GridArgs& args);

}  // namespace moher::cli

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

using moher::cli::ExitCode;

int dispatch(int argc, char** argv) {
  CLI::App app{"moher: inductive crowd-flow prediction for planned transit sites"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  bool deterministic = false;
  std::map<std::string, std::string> overrides;
  app.add_option("--config", config_path, "key=value configuration file");
  app.add_flag("--deterministic", deterministic, "single-threaded fixed-order execution");
  for (const auto& key : moher::io::config_keys()) {
    if (key.name == "deterministic") continue;
    app.add_option_function<std::string>(
        "--" + key.name, [&overrides, name = key.name](const std::string& v) { overrides[name] = v; }, key.help);
  }

  moher::cli::SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "generate a synthetic multi-mode city");
  c_synth->add_option("--out", synth.out, "output directory")->required();

  moher::cli::GraphArgs graphs;
  auto* c_graphs = app.add_subcommand("build-graphs", "materialize the localized graph window of a site");
  c_graphs->add_option("--data", graphs.data, "dataset directory")->required();
  c_graphs->add_option("--target", graphs.target, "site id of the target")->required();
  c_graphs->add_option("--slot", graphs.slot, "last slot of the window")->required();
  c_graphs->add_option("--pool", graphs.pool, "recorded sites: all | train")->check(CLI::IsMember({"all", "train"}));
  c_graphs->add_option("--out", graphs.out, "directory for nodes.csv and edges.csv");

  moher::cli::TrainArgs train;
  auto* c_train = app.add_subcommand("train", "train a model and write checkpoint, history and metrics");
  c_train->add_option("--data", train.data, "dataset directory")->required();
  c_train->add_option("--out", train.out, "output directory")->required();

  moher::cli::EvaluateArgs eval;
  auto* c_eval = app.add_subcommand("evaluate", "score a checkpoint and baselines on held-out sites");
  c_eval->add_option("--data", eval.data, "dataset directory");
  c_eval->add_option("--checkpoint", eval.checkpoint, "model checkpoint");
  c_eval->add_option("--baselines", eval.baselines, "comma-separated: na_ha, na_lstm, or none");
  c_eval->add_option("--split", eval.split, "test | validation")->check(CLI::IsMember({"test", "validation"}));
  c_eval->add_option("--out", eval.out, "metrics CSV");
  c_eval->add_option("--predictions", eval.predictions, "score a predictions CSV against --labels");
  c_eval->add_option("--labels", eval.labels, "labels CSV for --predictions");

  moher::cli::PredictArgs predict;
  auto* c_predict = app.add_subcommand("predict", "forecast the next slot for a site that is not in the data");
  c_predict->add_option("--data", predict.data, "dataset directory")->required();
  c_predict->add_option("--checkpoint", predict.checkpoint, "model checkpoint")->required();
  c_predict->add_option("--mode", predict.mode, "mode name of the new site")->required();
  c_predict->add_option("--x", predict.x_km, "x coordinate in km")->required();
  c_predict->add_option("--y", predict.y_km, "y coordinate in km")->required();
  c_predict->add_option("--poi", predict.poi, "comma-separated POI counts")->required();
  c_predict->add_option("--slot", predict.slot, "last observed slot; the forecast is for the next one")->required();
  c_predict->add_option("--name", predict.name, "label for the output row");

  moher::cli::GradcheckArgs gradcheck;
  auto* c_grad = app.add_subcommand("gradcheck", "finite-difference check of the model gradients");
  c_grad->add_option("--instances", gradcheck.instances, "random toy instances per ablation setting");
  c_grad->add_option("--max-nodes", gradcheck.max_nodes, "largest localized graph");

  moher::cli::GridArgs grid;
  auto* c_grid = app.add_subcommand("grid", "sweep neighbor budget and window length");
  c_grid->add_option("--data", grid.data, "dataset directory")->required();
  c_grid->add_option("--out", grid.out, "table CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ExitCode::kOk : ExitCode::kUsage;
  }

  moher::io::RunConfig config;
  if (!config_path.empty()) moher::io::load_config_file(config, config_path);
  for (const auto& [k, v] : overrides) moher::io::set_config(config, k, v);
  if (deterministic) config.deterministic = true;
  moher::io::apply_seed(config);

  if (c_synth->parsed()) return moher::cli::run_synth(config, synth);
  if (c_graphs->parsed()) return moher::cli::run_build_graphs(config, graphs);
  if (c_train->parsed()) return moher::cli::run_train(config, train);
  if (c_eval->parsed()) return moher::cli::run_evaluate(config, eval);
  if (c_predict->parsed()) return moher::cli::run_predict(config, predict);
  if (c_grad->parsed()) return moher::cli::run_gradcheck(config, gradcheck);
  if (c_grid->parsed()) return moher::cli::run_grid(config, grid);
  return ExitCode::kUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const moher::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return ExitCode::kUsage;
  } catch (const moher::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return ExitCode::kNumeric;
  } catch (const moher::Error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return ExitCode::kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ExitCode::kData;
  }
}

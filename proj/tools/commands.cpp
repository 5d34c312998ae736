// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "moher/baselines.hpp"
#include "moher/model.hpp"
#include "moher/sampler.hpp"
#include "moher/synthcity.hpp"
#include "moher/toy.hpp"
#include "moher/training.hpp"

namespace moher::cli {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

void print_metrics(const std::vector<io::MetricRow>& rows) {
  std::printf("method,split,rmse,mape,count\n");
  for (const io::MetricRow& r : rows) {
    std::printf("%s,%s,%s,%s,%zu\n", r.method.c_str(), r.split.c_str(), io::format_number(r.metrics.rmse).c_str(),
                io::format_number(r.metrics.mape).c_str(), r.metrics.count);
  }
}

ModelConfig bind(ModelConfig model, const Dataset& data) {
  model.mode_count = data.modes.size();
  model.input_dim = data.feature_dim;
  return model;
}

struct LoadedModel {
  io::RunConfig config;
  io::Checkpoint checkpoint;
  ModelConfig model;
};

LoadedModel load_model(const fs::path& path, const Dataset& data) {
  LoadedModel out;
  out.checkpoint = io::load_checkpoint(path);
  io::check_relations(out.checkpoint, io::relation_names(data.modes));
  for (const auto& [k, v] : io::parse_config_text(out.checkpoint.config_echo, path.string())) {
    io::set_config(out.config, k, v);
  }
  io::apply_seed(out.config);
  out.model = bind(out.config.train.model, data);
  if (out.checkpoint.normalizer.dim() != data.feature_dim) {
    throw DataError(path.string() + ": normalizer has " + std::to_string(out.checkpoint.normalizer.dim()) +
                    " channels, data has " + std::to_string(data.feature_dim));
  }
  return out;
}

io::Checkpoint make_checkpoint(const io::RunConfig& config, const Dataset& data, const TrainResult& result) {
  io::Checkpoint ck;
  ck.config_echo = io::echo_config(config);
  for (const Mode& m : data.modes) ck.modes.push_back(m.name);
  ck.relations = io::relation_names(data.modes);
  ck.normalizer = result.normalizer;
  ck.neighbor_budget = result.neighbor_budget;
  ck.params = result.params;
  return ck;
}

void log_epoch(const EpochRecord& r) {
  std::fprintf(stderr, "epoch %zu train_mse %.6g val_rmse %.6g val_mape %.6g\n", r.epoch, r.train_mse, r.val_rmse,
               r.val_mape);
}

std::vector<SiteUid> all_sites(const Dataset& data) {
  std::vector<SiteUid> out;
  for (const Site& s : data.sites) out.push_back(s.uid);
  return out;
}

// Scores rows of site_id,slot,<channels...> against the same layout.
Metrics score_files(const fs::path& predictions, const fs::path& labels) {
  const io::CsvTable pred = io::read_csv(predictions);
  const io::CsvTable lab = io::read_csv(labels);
  if (pred.header != lab.header) throw DataError("predictions and labels have different columns");
  if (pred.header.size() < 3 || pred.header[0] != "site_id" || pred.header[1] != "slot") {
    throw DataError(predictions.string() + ": expected columns site_id,slot followed by flow channels");
  }
  std::map<std::pair<std::string, long long>, std::size_t> index;
  for (std::size_t r = 0; r < lab.rows.size(); ++r) {
    if (!index.emplace(std::make_pair(lab.rows[r][0], lab.integer(r, 1)), r).second) {
      lab.fail(r, 1, "duplicate (site_id, slot)");
    }
  }
  std::vector<double> p, a;
  for (std::size_t r = 0; r < pred.rows.size(); ++r) {
    auto it = index.find({pred.rows[r][0], pred.integer(r, 1)});
    if (it == index.end()) pred.fail(r, 0, "no matching label row");
    for (std::size_t c = 2; c < pred.header.size(); ++c) {
      p.push_back(pred.number(r, c));
      a.push_back(lab.number(it->second, c));
    }
  }
  if (p.empty()) throw DataError(predictions.string() + ": no rows");
  return score(p, a);
}

}  // namespace

int run_synth(const io::RunConfig& config, const SynthArgs& args) {
  const SynthCity city = generate(config.synth);
  io::write_dataset(city.data, args.out);
  std::ofstream arche = open_out(args.out / "archetypes.csv");
  arche << "site_id,archetype\n";
  for (const Site& s : city.data.sites) arche << s.name << ',' << to_string(city.archetypes[s.uid]) << '\n';
  std::ofstream echo = open_out(args.out / "config.txt");
  echo << io::echo_config(config);
  std::fprintf(stderr, "wrote %zu sites, %zu slots, %zu clamped values to %s\n", city.data.sites.size(),
               city.data.slot_count, city.clamped, args.out.string().c_str());
  return kOk;
}

int run_build_graphs(const io::RunConfig& config, const GraphArgs& args) {
  const Dataset data = io::ingest_dir(args.data).data;
  const auto uid = data.find_site(args.target);
  if (!uid) throw DataError("unknown site '" + args.target + "'");
  if (args.slot < 0) throw RangeError("slot must be non-negative");
  const SplitPlan split = make_split(data, config.seed);
  std::vector<SiteUid> pool = args.pool == "train" ? split.train : all_sites(data);
  std::erase(pool, *uid);
  TrainConfig tc = config.train;
  tc.model = bind(tc.model, data);
  const std::size_t budget = resolve_neighbor_budget(data, split, tc);
  const SamplerSettings settings = sampler_settings(tc, budget);
  SampleFactory factory(data, pool, Normalizer::fit(data, pool, {0, data.slot_count}), settings);
  const auto sample =
      factory.make(data.site(*uid), static_cast<std::size_t>(args.slot), SampleMode::Inference, false);

  const fs::path dir = args.out.empty() ? fs::path(".") : args.out;
  std::ofstream nodes = open_out(dir / "nodes.csv");
  std::ofstream edges = open_out(dir / "edges.csv");
  nodes << "slot,index,site_id,mode,x_km,y_km\n";
  edges << "slot,site_a,site_b,relation,weight\n";
  for (const LocalizedGraph& g : sample->window->slots) {
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
      const Site& s = data.site(g.nodes[k]);
      nodes << g.slot << ',' << k << ',' << s.name << ',' << data.modes[s.mode].name << ','
            << io::format_number(s.coord.x_km) << ',' << io::format_number(s.coord.y_km) << '\n';
    }
    for (const Edge& e : g.edges) {
      edges << g.slot << ',' << data.site(e.i).name << ',' << data.site(e.j).name << ','
            << to_string(e.rel, data.modes) << ',' << io::format_number(e.weight) << '\n';
    }
  }
  std::fprintf(stderr, "neighbor budget %zu, %zu slots written to %s\n", budget, sample->window->slots.size(),
               dir.string().c_str());
  return kOk;
}

int run_train(const io::RunConfig& config, const TrainArgs& args) {
  const Dataset data = io::ingest_dir(args.data).data;
  const SplitPlan split = make_split(data, config.seed);
  const std::size_t repeats = std::max<std::size_t>(1, config.repeats);

  std::vector<io::MetricRow> rows;
  Metrics val_sum, test_sum;
  std::optional<TrainResult> best;
  for (std::size_t r = 0; r < repeats; ++r) {
    TrainConfig tc = config.train;
    tc.seed = config.train.seed + r;
    TrainResult result = train(data, split, tc, log_epoch);
    const MoherModel model(result.model);
    const SamplerSettings settings = sampler_settings(tc, result.neighbor_budget);
    const Evaluation val = evaluate(model, result.params, result.normalizer, data, split.train, split.validation,
                                    split.eval_slots, settings);
    const Evaluation test =
        evaluate(model, result.params, result.normalizer, data, split.train, split.test, split.eval_slots, settings);
    const std::string suffix = repeats > 1 ? "_" + std::to_string(r) : "";
    rows.push_back({"moher", "validation" + suffix, val.metrics});
    rows.push_back({"moher", "test" + suffix, test.metrics});
    val_sum.rmse += val.metrics.rmse;
    val_sum.mape += val.metrics.mape;
    test_sum.rmse += test.metrics.rmse;
    test_sum.mape += test.metrics.mape;
    if (!best || result.best_val_rmse < best->best_val_rmse) best = std::move(result);
  }
  if (repeats > 1) {
    const double n = static_cast<double>(repeats);
    rows.push_back({"moher", "validation_mean", {val_sum.rmse / n, val_sum.mape / n, repeats}});
    rows.push_back({"moher", "test_mean", {test_sum.rmse / n, test_sum.mape / n, repeats}});
  }

  fs::create_directories(args.out);
  io::save_checkpoint(make_checkpoint(config, data, *best), args.out / "model.ckpt");
  io::write_history(best->history, args.out / "history.csv");
  io::write_metrics(rows, args.out / "metrics.csv");
  print_metrics(rows);
  return kOk;
}

int run_evaluate(const io::RunConfig&, const EvaluateArgs& args) {
  if (!args.predictions.empty() || !args.labels.empty()) {
    if (args.predictions.empty() || args.labels.empty()) {
      throw UsageError("--predictions and --labels must be given together");
    }
    const std::vector<io::MetricRow> rows{{"file", "all", score_files(args.predictions, args.labels)}};
    if (!args.out.empty()) io::write_metrics(rows, args.out);
    print_metrics(rows);
    return kOk;
  }
  if (args.data.empty() || args.checkpoint.empty()) {
    throw UsageError("evaluate needs --data and --checkpoint, or --predictions and --labels");
  }
  const Dataset data = io::ingest_dir(args.data).data;
  const LoadedModel lm = load_model(args.checkpoint, data);
  const SplitPlan split = make_split(data, lm.config.seed);
  const std::vector<SiteUid>& sites = args.split == "test" ? split.test : split.validation;
  const SamplerSettings settings = sampler_settings(lm.config.train, lm.checkpoint.neighbor_budget);
  const MoherModel model(lm.model);
  const Normalizer& norm = lm.checkpoint.normalizer;

  std::vector<io::MetricRow> rows;
  const Evaluation ev =
      evaluate(model, lm.checkpoint.params, norm, data, split.train, sites, split.eval_slots, settings);
  rows.push_back({"moher", args.split, ev.metrics});

  const double gamma = lm.config.train.edges.gamma_km;
  const NeighborAverage na(data, split.train, gamma);
  for (const std::string& b : split_list(args.baselines)) {
    if (b == "none") continue;
    if (b == "na_ha") {
      rows.push_back({"na_ha", args.split, evaluate_na_ha(na, sites, split.eval_slots).metrics});
    } else if (b == "na_lstm") {
      const NaLstmModel m = train_na_lstm(data, split, norm, gamma, lm.config.na_lstm);
      rows.push_back({"na_lstm", args.split, evaluate_na_lstm(m, na, norm, sites, split.eval_slots).metrics});
    } else {
      throw UsageError("unknown baseline '" + b + "'");
    }
  }
  if (!args.out.empty()) io::write_metrics(rows, args.out);
  print_metrics(rows);
  return kOk;
}

int run_predict(const io::RunConfig&, const PredictArgs& args) {
  const Dataset data = io::ingest_dir(args.data).data;
  const LoadedModel lm = load_model(args.checkpoint, data);
  const auto mode = data.find_mode(args.mode);
  if (!mode) throw DataError("unknown mode '" + args.mode + "'");
  if (args.slot < 0) throw RangeError("slot must be non-negative");

  Site site;
  site.uid = -1;
  site.name = args.name;
  site.mode = *mode;
  site.coord = {args.x_km, args.y_km};
  site.recorded = false;
  for (const std::string& v : split_list(args.poi)) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != v.size() || !(x >= 0.0)) throw InvalidInput("--poi: '" + v + "' is not a non-negative count");
    site.poi.push_back(x);
  }
  if (site.poi.size() != data.poi_dim()) {
    throw InvalidInput("--poi has " + std::to_string(site.poi.size()) + " categories, data has " +
                       std::to_string(data.poi_dim()));
  }

  const SamplerSettings settings = sampler_settings(lm.config.train, lm.checkpoint.neighbor_budget);
  SampleFactory factory(data, all_sites(data), lm.checkpoint.normalizer, settings);
  const auto sample = factory.make(site, static_cast<std::size_t>(args.slot), SampleMode::Inference, false);
  const WindowSample* one[] = {&*sample};
  const BatchGraph bg = compile_batch(one, lm.model);
  const MoherModel model(lm.model);
  ad::Tape tape;
  const ad::Tensor y = model.forward(tape, ParamSource(lm.checkpoint.params), bg).value();
  std::vector<double> out(y.data(), y.data() + y.cols());
  lm.checkpoint.normalizer.invert(out);

  std::printf("site_id,slot");
  if (out.size() == 2) {
    std::printf(",in,out\n");
  } else {
    for (std::size_t c = 0; c < out.size(); ++c) std::printf(",c%zu", c);
    std::printf("\n");
  }
  std::printf("%s,%lld", site.name.c_str(), args.slot + 1);
  for (double v : out) std::printf(",%s", io::format_number(v).c_str());
  std::printf("\n");
  if (bg.isolated[bg.window - 1]) std::fprintf(stderr, "warning: the new site has no neighbor at the last slot\n");
  return kOk;
}

int run_gradcheck(const io::RunConfig& config, const GradcheckArgs& args) {
  struct Setting {
    const char* name;
    void (*apply)(ModelConfig&);
  };
  const Setting settings[] = {
      {"full", [](ModelConfig&) {}},
      {"no_cross_mode", [](ModelConfig& c) { c.use_cross_mode = false; }},
      {"no_poi", [](ModelConfig& c) { c.use_poi = false; }},
      {"no_differences", [](ModelConfig& c) { c.use_differences = false; }},
      {"no_basis", [](ModelConfig& c) { c.use_basis_regularization = false; }},
  };
  bool ok = true;
  std::printf("setting,instances,checked,kinks_excluded,max_rel_error,passed\n");
  for (const Setting& s : settings) {
    ModelConfig mc;
    mc.mode_count = 2;
    mc.input_dim = 2;
    mc.hidden_dims = {3, 3};
    mc.basis_count = 2;
    mc.lstm_hidden = 3;
    mc.window = 3;
    s.apply(mc);
    std::size_t checked = 0, kinks = 0;
    double worst = 0.0;
    bool passed = true;
    for (std::size_t i = 0; i < args.instances; ++i) {
      const std::uint64_t seed = config.seed * 1000003ULL + i;
      const ToyInstance toy = make_toy_instance(seed, mc, args.max_nodes);
      const ad::GradCheckReport rep = check_model_gradients(mc, toy, seed + 17);
      checked += rep.checked;
      kinks += rep.kinks.size();
      worst = std::max(worst, rep.max_rel_error);
      if (!rep.passed) {
        passed = false;
        std::fprintf(stderr, "%s instance %zu: %s\n", s.name, i, rep.diagnostics.c_str());
      }
    }
    ok = ok && passed;
    std::printf("%s,%zu,%zu,%zu,%s,%s\n", s.name, args.instances, checked, kinks, io::format_number(worst).c_str(),
                passed ? "yes" : "no");
  }
  if (!ok) throw NumericError("gradient check failed");
  return kOk;
}

int run_grid(const io::RunConfig& config, const GridArgs& args) {
  const Dataset data = io::ingest_dir(args.data).data;
  const SplitPlan split = make_split(data, config.seed);
  std::ostringstream table;
  table << "m,window,val_rmse,test_rmse,test_mape\n";
  for (std::size_t m : config.grid_m) {
    for (std::size_t w : config.grid_window) {
      TrainConfig tc = config.train;
      tc.neighbor_budget = m;
      tc.model.window = w;
      const TrainResult result = train(data, split, tc);
      const Evaluation test = evaluate(MoherModel(result.model), result.params, result.normalizer, data,
                                       split.train, split.test, split.eval_slots, sampler_settings(tc, m));
      table << m << ',' << w << ',' << io::format_number(result.best_val_rmse) << ','
            << io::format_number(test.metrics.rmse) << ',' << io::format_number(test.metrics.mape) << '\n';
      std::fprintf(stderr, "m %zu window %zu test_rmse %.6g\n", m, w, test.metrics.rmse);
    }
  }
  if (!args.out.empty()) open_out(args.out) << table.str();
  std::printf("%s", table.str().c_str());
  return kOk;
}

}  // namespace moher::cli

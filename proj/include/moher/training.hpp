// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "moher/autodiff.hpp"
#include "moher/graph.hpp"
#include "moher/model.hpp"

namespace moher {

/// Per-channel Z-score statistics (population standard deviation).
class Normalizer {
 public:
  Normalizer() = default;
  Normalizer(std::vector<double> mean, std::vector<double> stddev);

  /// `values` holds rows of `dim` channels. Throws NumericError on a
  /// zero-variance channel.
  static Normalizer fit(std::span<const double> values, std::size_t dim);
  /// Fit over the given sites' records inside `slots`.
  static Normalizer fit(const Dataset& data, std::span<const SiteUid> sites, SlotRange slots);

  std::size_t dim() const { return mean_.size(); }
  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& stddev() const { return stddev_; }

  void apply(std::span<double> row) const;
  void invert(std::span<double> row) const;

 private:
  std::vector<double> mean_;
  std::vector<double> stddev_;
};

struct SplitPlan {
  std::vector<SiteUid> train;
  std::vector<SiteUid> validation;
  std::vector<SiteUid> test;
  SlotRange train_slots;
  SlotRange eval_slots;
  std::uint64_t seed = 0;
};

/// 70/20/10 site split (validation and test sizes rounded down) and a
/// 60/40 chronological slot split. Requires at least 10 sites.
SplitPlan make_split(const Dataset& data, std::uint64_t seed);

/// Moves a removed site's flow onto its geo neighbors. Neighbor j receives
/// share eps_j * T_j / sum_k eps_k * T_k of `removed` (T = channel total), or
/// an equal share when every weighted total is zero. Returns the neighbors'
/// updated flows in input order.
std::vector<std::vector<double>> simulate_new_site(std::span<const double> removed,
                                                   std::span<const double> weights,
                                                   const std::vector<std::vector<double>>& neighbor_flows);

/// Read counters for the inductive contract. Reads of the current target's
/// own records are only legal as labels or, during training, as the source
/// of the simulated redistribution.
struct FlowAudit {
  std::size_t input_reads = 0;
  std::size_t label_reads = 0;
  std::size_t simulation_reads = 0;
  std::size_t target_input_reads = 0;
};

enum class SampleMode {
  Training,  // target removed and its flow redistributed to geo neighbors
  Inference  // target was never recorded; neighbors used as observed
};

struct SamplerSettings {
  std::size_t window = 6;
  std::size_t neighbor_budget = 10;
  EdgeParams edges;
};

/// Builds model inputs for (target, end slot) pairs with cached graphs.
class SampleFactory {
 public:
  SampleFactory(const Dataset& data, std::vector<SiteUid> pool, const Normalizer& normalizer,
                SamplerSettings settings);

  /// Returns nullopt when a training target has no geo neighbor to absorb its
  /// flow at some slot of the window.
  std::optional<WindowSample> make(const Site& target, std::size_t end_slot, SampleMode mode,
                                   bool with_label);

  const FlowAudit& audit() const { return audit_; }
  const SamplerSettings& settings() const { return settings_; }
  std::span<const SiteUid> pool() const { return pool_; }
  std::size_t cached_graphs() const { return cache_.size(); }

 private:
  struct SlotView {
    std::shared_ptr<const LocalizedGraph> graph;
    std::vector<std::pair<SiteUid, double>> geo_neighbors;  // all active pool sites
  };
  const SlotView& slot_view(const Site& target, std::size_t slot);
  std::span<const double> read_input(SiteUid uid, SiteUid target, std::size_t slot);

  const Dataset& data_;
  std::vector<SiteUid> pool_;
  Normalizer normalizer_;
  SamplerSettings settings_;
  FlowAudit audit_;
  std::map<std::uint64_t, SlotView> cache_;
};

struct TrainConfig {
  ModelConfig model;
  EdgeParams edges;
  std::size_t neighbor_budget = 0;  // 0 selects the two-hop geo default
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::size_t samples_per_epoch = 512;
  std::size_t max_epochs = 200;
  std::size_t patience = 10;
  double pseudo_fraction = 0.25;
  std::size_t val_stride = 4;  // evaluate every n-th validation slot
  std::uint64_t seed = 1;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_mse = 0.0;
  double val_rmse = 0.0;
  double val_mape = 0.0;
};

struct Metrics {
  double rmse = 0.0;
  double mape = 0.0;
  std::size_t count = 0;
};

/// RMSE and MAPE over every value; MAPE divides by max(y, floor).
Metrics score(std::span<const double> predicted, std::span<const double> actual, double mape_floor = 1.0);

struct TrainResult {
  ModelConfig model;
  ad::ParamStore params;
  Normalizer normalizer;
  std::size_t neighbor_budget = 0;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  double best_val_rmse = 0.0;
  std::size_t skipped_samples = 0;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Resolves the neighbor budget (0 means the two-hop geo mean over train sites).
std::size_t resolve_neighbor_budget(const Dataset& data, const SplitPlan& split, const TrainConfig& config);
SamplerSettings sampler_settings(const TrainConfig& config, std::size_t neighbor_budget);

TrainResult train(const Dataset& data, const SplitPlan& split, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

struct Forecast {
  SiteUid site = 0;
  std::size_t slot = 0;  // the predicted slot
  std::vector<double> predicted;
  std::vector<double> actual;
};

struct Evaluation {
  Metrics metrics;
  std::vector<Forecast> forecasts;
  FlowAudit audit;
  std::size_t isolated = 0;
};

/// Predicts slot t+1 for every site in `sites` and every t+1 in `slots`
/// (every `stride`-th), using only the recorded sites in `pool` as inputs.
Evaluation evaluate(const MoherModel& model, const ad::ParamStore& params, const Normalizer& normalizer,
                    const Dataset& data, std::span<const SiteUid> pool, std::span<const SiteUid> sites,
                    SlotRange slots, const SamplerSettings& settings, std::size_t stride = 1);

}  // namespace moher

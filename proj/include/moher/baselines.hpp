// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "moher/autodiff.hpp"
#include "moher/graph.hpp"
#include "moher/training.hpp"

namespace moher {

struct BaselinePrediction {
  std::vector<double> value;
  bool fallback = false;  // no same-mode neighbor; the global same-mode mean was used
};

/// Mean flow of a target's same-mode geo neighbors among the recorded pool.
class NeighborAverage {
 public:
  NeighborAverage(const Dataset& data, std::vector<SiteUid> pool, double gamma_km);

  /// Same-mode pool sites with positive geo weight, ascending uid.
  std::vector<SiteUid> neighbors(const Site& target) const;
  /// Neighbor-average flow at `slot`; falls back to the mean over every
  /// same-mode pool site when no neighbor is active.
  BaselinePrediction at(const Site& target, std::size_t slot) const;
  /// NA-HA: mean over slots 0..t of the neighbor-average series.
  BaselinePrediction history_mean(const Site& target, std::size_t t) const;

  const Dataset& data() const { return data_; }
  std::span<const SiteUid> pool() const { return pool_; }

 private:
  BaselinePrediction average(std::span<const SiteUid> members, std::size_t slot) const;

  const Dataset& data_;
  std::vector<SiteUid> pool_;
  double gamma_km_;
};

Evaluation evaluate_na_ha(const NeighborAverage& na, std::span<const SiteUid> sites, SlotRange slots,
                          std::size_t stride = 1);

struct NaLstmConfig {
  std::size_t window = 6;
  std::size_t hidden = 32;
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::size_t samples_per_epoch = 512;
  std::size_t max_epochs = 60;
  std::size_t patience = 10;
  std::size_t val_stride = 4;
  std::uint64_t seed = 1;
};

struct NaLstmModel {
  ad::ParamStore params;  // "na_lstm.*"
  std::size_t window = 6;
  std::vector<EpochRecord> history;
};

/// Input sequence (window x channels, normalized) for predicting slot t+1.
ad::Tensor na_lstm_inputs(const NeighborAverage& na, const Normalizer& normalizer, const Site& target,
                          std::size_t t, std::size_t window, bool* fallback = nullptr);
BaselinePrediction na_lstm_predict(const NaLstmModel& model, const NeighborAverage& na,
                                   const Normalizer& normalizer, const Site& target, std::size_t t);

NaLstmModel train_na_lstm(const Dataset& data, const SplitPlan& split, const Normalizer& normalizer,
                          double gamma_km, const NaLstmConfig& config);
Evaluation evaluate_na_lstm(const NaLstmModel& model, const NeighborAverage& na, const Normalizer& normalizer,
                            std::span<const SiteUid> sites, SlotRange slots, std::size_t stride = 1);

}  // namespace moher

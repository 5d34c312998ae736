// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include <gtest/gtest.h>

#include <cmath>

#include "moher/baselines.hpp"
#include "moher/synthcity.hpp"
#include "test_support.hpp"

namespace moher {
namespace {

// Five sites on a line 0.5 km apart: modes 0 0 1 0 0, uid = index.
Dataset line_dataset() {
  Dataset d;
  d.modes = {{0, "a"}, {1, "b"}};
  const ModeId modes[] = {0, 0, 1, 0, 0};
  d.slot_count = 4;
  for (SiteUid i = 0; i < 5; ++i) {
    Site s;
    s.uid = i;
    s.name = "s" + std::to_string(i);
    s.mode = modes[i];
    s.coord = {0.5 * static_cast<double>(i), 0.0};
    s.poi = {1.0};
    d.sites.push_back(s);
    FlowSeries f;
    f.site = i;
    for (std::size_t t = 0; t < 4; ++t) {
      f.values.push_back(10.0 * static_cast<double>(i) + static_cast<double>(t));
      f.values.push_back(1.0);
    }
    d.flows.push_back(f);
  }
  return d;
}

TEST(NeighborAverage, SameModeWithinCutoff) {
  const Dataset d = line_dataset();
  const NeighborAverage na(d, {1, 2, 3, 4}, 1.2);
  // Target 0 reaches uids 1 and 2 within 1.2 km; uid 2 has another mode.
  EXPECT_EQ(na.neighbors(d.site(0)), (std::vector<SiteUid>{1}));
  EXPECT_EQ(na.neighbors(d.site(3)), (std::vector<SiteUid>{1, 4}));
  const BaselinePrediction p = na.at(d.site(3), 2);
  EXPECT_FALSE(p.fallback);
  EXPECT_DOUBLE_EQ(p.value[0], (12.0 + 42.0) / 2.0);
  EXPECT_DOUBLE_EQ(p.value[1], 1.0);
}

TEST(NeighborAverage, FallsBackToSameModeMean) {
  const Dataset d = line_dataset();
  const NeighborAverage na(d, {1, 3, 4}, 0.3);
  const BaselinePrediction p = na.at(d.site(0), 1);
  EXPECT_TRUE(p.fallback);
  EXPECT_DOUBLE_EQ(p.value[0], (11.0 + 31.0 + 41.0) / 3.0);
}

TEST(NeighborAverage, HistoryMeanAveragesSlots) {
  const Dataset d = line_dataset();
  const NeighborAverage na(d, {1, 2, 3, 4}, 1.2);
  const BaselinePrediction p = na.history_mean(d.site(0), 2);
  EXPECT_DOUBLE_EQ(p.value[0], (10.0 + 11.0 + 12.0) / 3.0);
  EXPECT_THROW(na.history_mean(d.site(0), 4), RangeError);
}

TEST(NaHa, EvaluationScoresAgainstRecordedFlow) {
  const Dataset d = line_dataset();
  const std::vector<SiteUid> pool{1, 2, 3, 4};
  const NeighborAverage na(d, pool, 1.2);
  const std::vector<SiteUid> sites{0};
  const Evaluation ev = evaluate_na_ha(na, sites, {1, 4});
  ASSERT_EQ(ev.forecasts.size(), 3u);
  // Predictions for slots 1..3 are means of 10..t-1; actual is 0..3.
  double se = 0.0;
  for (std::size_t t = 1; t < 4; ++t) {
    double mean = 0.0;
    for (std::size_t s = 0; s < t; ++s) mean += 10.0 + static_cast<double>(s);
    mean /= static_cast<double>(t);
    se += (mean - static_cast<double>(t)) * (mean - static_cast<double>(t));
  }
  EXPECT_NEAR(ev.metrics.rmse, std::sqrt(se / 6.0), 1e-12);
  EXPECT_THROW(evaluate_na_ha(na, pool, {1, 4}), InvalidInput);
}

TEST(NaLstm, InputsAreNormalizedNeighborAverages) {
  const Dataset d = line_dataset();
  const NeighborAverage na(d, {1, 2, 3, 4}, 1.2);
  const Normalizer norm({10.0, 0.0}, {2.0, 1.0});
  bool fallback = true;
  const ad::Tensor x = na_lstm_inputs(na, norm, d.site(0), 3, 2, &fallback);
  EXPECT_FALSE(fallback);
  EXPECT_DOUBLE_EQ(x(0, 0), (12.0 - 10.0) / 2.0);
  EXPECT_DOUBLE_EQ(x(1, 0), (13.0 - 10.0) / 2.0);
  EXPECT_DOUBLE_EQ(x(1, 1), 1.0);
  EXPECT_THROW(na_lstm_inputs(na, norm, d.site(0), 0, 2), RangeError);
}

TEST(NaLstm, TrainsDeterministically) {
  SynthConfig sc;
  sc.sites_per_mode = {8, 8, 8};
  sc.slots = 60;
  sc.plane_km = 4.0;
  sc.zones = 4;
  const SynthCity city = generate(sc);
  const SplitPlan split = make_split(city.data, 2);
  const Normalizer norm = Normalizer::fit(city.data, split.train, split.train_slots);
  NaLstmConfig c;
  c.window = 3;
  c.hidden = 4;
  c.samples_per_epoch = 256;
  c.max_epochs = 8;
  c.learning_rate = 1e-2;
  const NaLstmModel a = train_na_lstm(city.data, split, norm, 1.5, c);
  const NaLstmModel b = train_na_lstm(city.data, split, norm, 1.5, c);
  ASSERT_EQ(a.history.size(), b.history.size());
  EXPECT_LT(a.history.back().train_mse, a.history.front().train_mse);
  EXPECT_LT(a.history.back().val_rmse, a.history.front().val_rmse);
  for (const auto& [name, p] : a.params) EXPECT_EQ(b.params.at(name).value, p.value);

  const NeighborAverage na(city.data, split.train, 1.5);
  const Evaluation ev = evaluate_na_lstm(a, na, norm, split.test, split.eval_slots);
  EXPECT_TRUE(std::isfinite(ev.metrics.rmse));
  EXPECT_EQ(ev.forecasts.size(), split.test.size() * (split.eval_slots.end - split.eval_slots.begin));
}

}  // namespace
}  // namespace moher

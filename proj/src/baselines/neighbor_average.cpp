// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include <algorithm>
#include <cmath>
#include <limits>

#include "moher/baselines.hpp"
#include "moher/model.hpp"
#include "moher/rng.hpp"

namespace moher {

NeighborAverage::NeighborAverage(const Dataset& data, std::vector<SiteUid> pool, double gamma_km)
    : data_(data), pool_(std::move(pool)), gamma_km_(gamma_km) {
  std::sort(pool_.begin(), pool_.end());
}

std::vector<SiteUid> NeighborAverage::neighbors(const Site& target) const {
  std::vector<SiteUid> out;
  for (SiteUid uid : pool_) {
    if (uid == target.uid) continue;
    const Site& s = data_.site(uid);
    if (s.mode == target.mode && encode_geo(target, s, gamma_km_) > 0.0) out.push_back(uid);
  }
  return out;
}

BaselinePrediction NeighborAverage::average(std::span<const SiteUid> members, std::size_t slot) const {
  BaselinePrediction p;
  p.value.assign(data_.feature_dim, 0.0);
  std::size_t n = 0;
  for (SiteUid uid : members) {
    const FlowSeries& f = data_.flow(uid);
    if (!f.active(slot)) continue;
    const auto row = f.at(slot);
    for (std::size_t k = 0; k < row.size(); ++k) p.value[k] += row[k];
    ++n;
  }
  if (n == 0) {
    p.fallback = true;
    return p;
  }
  for (double& v : p.value) v /= static_cast<double>(n);
  return p;
}

BaselinePrediction NeighborAverage::at(const Site& target, std::size_t slot) const {
  const std::vector<SiteUid> near = neighbors(target);
  BaselinePrediction p = average(near, slot);
  if (!p.fallback) return p;
  std::vector<SiteUid> same;
  for (SiteUid uid : pool_) {
    if (uid != target.uid && data_.site(uid).mode == target.mode) same.push_back(uid);
  }
  BaselinePrediction g = average(same, slot);
  g.fallback = true;
  return g;
}

BaselinePrediction NeighborAverage::history_mean(const Site& target, std::size_t t) const {
  if (t >= data_.slot_count) throw RangeError("history_mean: slot " + std::to_string(t) + " is past the data");
  const std::vector<SiteUid> near = neighbors(target);
  std::vector<SiteUid> same;
  for (SiteUid uid : pool_) {
    if (uid != target.uid && data_.site(uid).mode == target.mode) same.push_back(uid);
  }
  const bool fallback = near.empty();
  const std::span<const SiteUid> members = fallback ? std::span<const SiteUid>(same) : std::span<const SiteUid>(near);
  BaselinePrediction out;
  out.value.assign(data_.feature_dim, 0.0);
  out.fallback = fallback;
  std::size_t n = 0;
  for (std::size_t s = 0; s <= t; ++s) {
    const BaselinePrediction p = average(members, s);
    if (p.fallback) continue;  // nobody recorded at this slot
    for (std::size_t k = 0; k < p.value.size(); ++k) out.value[k] += p.value[k];
    ++n;
  }
  if (n == 0) throw DataError("NA-HA: no same-mode history for site " + std::to_string(target.uid));
  for (double& v : out.value) v /= static_cast<double>(n);
  return out;
}

namespace {

Evaluation finish(Evaluation out) {
  if (out.forecasts.empty()) throw InvalidInput("evaluate: no forecasts in the requested sites and slots");
  std::vector<double> pred, actual;
  for (const Forecast& f : out.forecasts) {
    pred.insert(pred.end(), f.predicted.begin(), f.predicted.end());
    actual.insert(actual.end(), f.actual.begin(), f.actual.end());
  }
  out.metrics = score(pred, actual);
  return out;
}

void check_disjoint(std::span<const SiteUid> pool, std::span<const SiteUid> sites) {
  for (SiteUid s : sites) {
    if (std::binary_search(pool.begin(), pool.end(), s)) {
      throw InvalidInput("evaluation site " + std::to_string(s) + " is also a recorded input site");
    }
  }
}

}  // namespace

Evaluation evaluate_na_ha(const NeighborAverage& na, std::span<const SiteUid> sites, SlotRange slots,
                          std::size_t stride) {
  check_disjoint(na.pool(), sites);
  if (stride == 0) stride = 1;
  const Dataset& data = na.data();
  Evaluation out;
  for (SiteUid uid : sites) {
    const Site& site = data.site(uid);
    for (std::size_t label = slots.begin; label < slots.end && label < data.slot_count; label += stride) {
      if (label == 0) continue;
      const BaselinePrediction p = na.history_mean(site, label - 1);
      Forecast f;
      f.site = uid;
      f.slot = label;
      f.predicted = p.value;
      const auto y = data.flow(uid).at(label);
      f.actual.assign(y.begin(), y.end());
      if (p.fallback) ++out.isolated;
      out.forecasts.push_back(std::move(f));
    }
  }
  return finish(std::move(out));
}

ad::Tensor na_lstm_inputs(const NeighborAverage& na, const Normalizer& normalizer, const Site& target,
                          std::size_t t, std::size_t window, bool* fallback) {
  if (t + 1 < window) throw RangeError("NA-LSTM window starts before the first slot");
  ad::Tensor x(window, na.data().feature_dim);
  bool any_fallback = false;
  for (std::size_t s = 0; s < window; ++s) {
    BaselinePrediction p = na.at(target, t + 1 - window + s);
    any_fallback = any_fallback || p.fallback;
    normalizer.apply(p.value);
    std::copy(p.value.begin(), p.value.end(), x.row_span(s).begin());
  }
  if (fallback != nullptr) *fallback = any_fallback;
  return x;
}

namespace {

// Predictions (batch x channels) for a batch of input sequences.
ad::Var na_lstm_batch(ad::Tape& tape, const ParamSource& params, const std::vector<ad::Tensor>& inputs,
                      std::size_t window) {
  const std::size_t dim = inputs.front().cols();
  std::vector<ad::Var> steps;
  for (std::size_t s = 0; s < window; ++s) {
    ad::Tensor step(inputs.size(), dim);
    for (std::size_t b = 0; b < inputs.size(); ++b) {
      const auto row = inputs[b].row_span(s);
      std::copy(row.begin(), row.end(), step.row_span(b).begin());
    }
    steps.push_back(tape.constant(std::move(step)));
  }
  return lstm_forward(tape, params, "na_lstm", steps);
}

}  // namespace

BaselinePrediction na_lstm_predict(const NaLstmModel& model, const NeighborAverage& na,
                                   const Normalizer& normalizer, const Site& target, std::size_t t) {
  BaselinePrediction out;
  const std::vector<ad::Tensor> inputs{na_lstm_inputs(na, normalizer, target, t, model.window, &out.fallback)};
  ad::Tape tape;
  const ad::Tensor& y = na_lstm_batch(tape, ParamSource(model.params), inputs, model.window).value();
  out.value.assign(y.values().begin(), y.values().end());
  normalizer.invert(out.value);
  return out;
}

Evaluation evaluate_na_lstm(const NaLstmModel& model, const NeighborAverage& na, const Normalizer& normalizer,
                            std::span<const SiteUid> sites, SlotRange slots, std::size_t stride) {
  check_disjoint(na.pool(), sites);
  if (stride == 0) stride = 1;
  const Dataset& data = na.data();
  Evaluation out;
  for (SiteUid uid : sites) {
    const Site& site = data.site(uid);
    for (std::size_t label = slots.begin; label < slots.end && label < data.slot_count; label += stride) {
      if (label < model.window) continue;
      const BaselinePrediction p = na_lstm_predict(model, na, normalizer, site, label - 1);
      Forecast f;
      f.site = uid;
      f.slot = label;
      f.predicted = p.value;
      const auto y = data.flow(uid).at(label);
      f.actual.assign(y.begin(), y.end());
      if (p.fallback) ++out.isolated;
      out.forecasts.push_back(std::move(f));
    }
  }
  return finish(std::move(out));
}

NaLstmModel train_na_lstm(const Dataset& data, const SplitPlan& split, const Normalizer& normalizer,
                          double gamma_km, const NaLstmConfig& config) {
  if (config.window == 0 || config.batch_size == 0) throw InvalidInput("NA-LSTM: window and batch size must be positive");
  const std::size_t window = config.window;
  const std::size_t first_end = std::max(split.train_slots.begin, window - 1);
  if (split.train_slots.end < first_end + 2) throw DataError("NA-LSTM: training range shorter than one window");
  const std::size_t last_end = split.train_slots.end - 2;

  NaLstmModel model;
  model.window = window;
  Rng rng(config.seed);
  init_lstm(model.params, "na_lstm", data.feature_dim, config.hidden, data.feature_dim, rng);
  ad::AdamOptions adam;
  adam.lr = config.learning_rate;

  // neighbors() never includes the target itself, so a training target is
  // averaged over the rest of the pool.
  const NeighborAverage na(data, split.train, gamma_km);

  ad::ParamStore best = model.params;
  double best_rmse = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    for (std::size_t done = 0; done < config.samples_per_epoch; done += config.batch_size) {
      const std::size_t n = std::min(config.batch_size, config.samples_per_epoch - done);
      std::vector<ad::Tensor> inputs;
      ad::Tensor labels(n, data.feature_dim);
      for (std::size_t b = 0; b < n; ++b) {
        const Site& v = data.site(split.train[rng.below(split.train.size())]);
        const std::size_t t = first_end + rng.below(last_end - first_end + 1);
        inputs.push_back(na_lstm_inputs(na, normalizer, v, t, window));
        const auto y = data.flow(v.uid).at(t + 1);
        std::copy(y.begin(), y.end(), labels.row_span(b).begin());
        normalizer.apply(labels.row_span(b));
      }
      model.params.zero_grad();
      ad::Tape tape;
      const ad::Var loss =
          ad::mse(na_lstm_batch(tape, ParamSource(model.params), inputs, window), tape.constant(labels));
      if (!std::isfinite(loss.value()[0])) throw NumericError("NA-LSTM training diverged");
      tape.backward(loss);
      ad::adam_step(model.params, adam);
      loss_sum += loss.value()[0] * static_cast<double>(n);
      loss_count += n;
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_mse = loss_sum / static_cast<double>(std::max<std::size_t>(1, loss_count));
    const Evaluation val = evaluate_na_lstm(model, na, normalizer, split.validation, split.eval_slots,
                                            config.val_stride);
    rec.val_rmse = val.metrics.rmse;
    rec.val_mape = val.metrics.mape;
    model.history.push_back(rec);
    if (rec.val_rmse < best_rmse) {
      best_rmse = rec.val_rmse;
      best = model.params;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  model.params = std::move(best);
  return model;
}

}  // namespace moher

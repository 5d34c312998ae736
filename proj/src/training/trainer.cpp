// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "moher/rng.hpp"
#include "moher/training.hpp"

namespace moher {

namespace {

constexpr std::size_t kEvalBatch = 64;

ModelConfig bind_to_data(ModelConfig model, const Dataset& data) {
  model.mode_count = data.modes.size();
  model.input_dim = data.feature_dim;
  return model;
}

void check_disjoint(std::span<const SiteUid> pool, std::span<const SiteUid> sites) {
  for (SiteUid s : sites) {
    if (std::find(pool.begin(), pool.end(), s) != pool.end()) {
      throw InvalidInput("evaluation site " + std::to_string(s) + " is also a recorded input site");
    }
  }
}

Evaluation evaluate_with(const MoherModel& model, const ad::ParamStore& params, const Normalizer& normalizer,
                         const Dataset& data, SampleFactory& factory, std::span<const SiteUid> sites,
                         SlotRange slots, std::size_t stride) {
  check_disjoint(factory.pool(), sites);
  if (stride == 0) stride = 1;
  const std::size_t window = model.config().window;
  Evaluation out;
  std::vector<WindowSample> pending;
  std::vector<std::pair<SiteUid, std::size_t>> keys;

  auto flush = [&]() {
    if (pending.empty()) return;
    std::vector<const WindowSample*> ptrs;
    for (const WindowSample& s : pending) ptrs.push_back(&s);
    const BatchGraph bg = compile_batch(ptrs, model.config());
    for (std::size_t b = 0; b < bg.batch; ++b) {
      if (bg.isolated[(bg.window - 1) * bg.batch + b]) ++out.isolated;
    }
    ad::Tape tape;
    const ad::Tensor y = model.forward(tape, ParamSource(params), bg).value();
    const std::size_t dim = y.cols();
    for (std::size_t b = 0; b < pending.size(); ++b) {
      Forecast f;
      f.site = keys[b].first;
      f.slot = keys[b].second;
      f.predicted.assign(y.data() + b * dim, y.data() + (b + 1) * dim);
      normalizer.invert(f.predicted);
      f.actual = pending[b].label;
      normalizer.invert(f.actual);
      out.forecasts.push_back(std::move(f));
    }
    pending.clear();
    keys.clear();
  };

  for (SiteUid uid : sites) {
    const Site& site = data.site(uid);
    for (std::size_t label = slots.begin; label < slots.end; label += stride) {
      if (label < window || label >= data.slot_count) continue;
      auto s = factory.make(site, label - 1, SampleMode::Inference, true);
      pending.push_back(std::move(*s));
      keys.emplace_back(uid, label);
      if (pending.size() == kEvalBatch) flush();
    }
  }
  flush();
  if (out.forecasts.empty()) throw InvalidInput("evaluate: no forecasts in the requested sites and slots");

  std::vector<double> pred, actual;
  for (const Forecast& f : out.forecasts) {
    pred.insert(pred.end(), f.predicted.begin(), f.predicted.end());
    actual.insert(actual.end(), f.actual.begin(), f.actual.end());
  }
  out.metrics = score(pred, actual);
  out.audit = factory.audit();
  return out;
}

}  // namespace

std::size_t resolve_neighbor_budget(const Dataset& data, const SplitPlan& split, const TrainConfig& config) {
  if (config.neighbor_budget > 0) return config.neighbor_budget;
  return std::max<std::size_t>(1, mean_two_hop_geo_neighborhood(data, split.train, config.edges.gamma_km));
}

SamplerSettings sampler_settings(const TrainConfig& config, std::size_t neighbor_budget) {
  SamplerSettings s;
  s.window = config.model.window;
  s.neighbor_budget = neighbor_budget;
  s.edges = config.edges;
  return s;
}

Evaluation evaluate(const MoherModel& model, const ad::ParamStore& params, const Normalizer& normalizer,
                    const Dataset& data, std::span<const SiteUid> pool, std::span<const SiteUid> sites,
                    SlotRange slots, const SamplerSettings& settings, std::size_t stride) {
  SampleFactory factory(data, {pool.begin(), pool.end()}, normalizer, settings);
  return evaluate_with(model, params, normalizer, data, factory, sites, slots, stride);
}

TrainResult train(const Dataset& data, const SplitPlan& split, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  if (split.train.empty() || split.validation.empty()) throw InvalidInput("train: split has no train or validation sites");
  if (config.batch_size == 0) throw InvalidInput("train: batch_size must be positive");
  if (config.pseudo_fraction <= 0.0 || config.pseudo_fraction > 1.0) {
    throw InvalidInput("train: pseudo_fraction must lie in (0, 1]");
  }
  TrainResult result;
  result.model = bind_to_data(config.model, data);
  const MoherModel model(result.model);
  result.normalizer = Normalizer::fit(data, split.train, split.train_slots);
  result.neighbor_budget = resolve_neighbor_budget(data, split, config);
  const SamplerSettings settings = sampler_settings(config, result.neighbor_budget);

  const std::size_t window = result.model.window;
  const std::size_t first_end = std::max(split.train_slots.begin, window - 1);
  if (split.train_slots.end < first_end + 2) {
    throw DataError("train: the training slot range is shorter than one window plus a label");
  }
  const std::size_t last_end = split.train_slots.end - 2;  // label stays inside the range

  SampleFactory factory(data, split.train, result.normalizer, settings);
  ad::ParamStore params;
  model.init_params(params, config.seed);
  ad::AdamOptions adam;
  adam.lr = config.learning_rate;

  Rng rng(mix64(config.seed ^ 0x7472616e69ULL));
  const std::size_t pseudo_count = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(config.pseudo_fraction * static_cast<double>(split.train.size()))));

  ad::ParamStore best = params;
  double best_rmse = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::vector<SiteUid> pseudo = split.train;
    rng.shuffle(pseudo);
    pseudo.resize(pseudo_count);

    std::vector<WindowSample> samples;
    for (std::size_t k = 0; k < config.samples_per_epoch; ++k) {
      const SiteUid v = pseudo[rng.below(pseudo.size())];
      const std::size_t t = first_end + rng.below(last_end - first_end + 1);
      auto s = factory.make(data.site(v), t, SampleMode::Training, true);
      if (s) {
        samples.push_back(std::move(*s));
      } else {
        ++result.skipped_samples;
      }
    }

    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    for (std::size_t begin = 0; begin < samples.size(); begin += config.batch_size) {
      const std::size_t end = std::min(samples.size(), begin + config.batch_size);
      std::vector<const WindowSample*> ptrs;
      ad::Tensor labels(end - begin, result.model.input_dim);
      for (std::size_t i = begin; i < end; ++i) {
        ptrs.push_back(&samples[i]);
        std::copy(samples[i].label.begin(), samples[i].label.end(), labels.row_span(i - begin).begin());
      }
      const BatchGraph bg = compile_batch(ptrs, result.model);
      params.zero_grad();
      ad::Tape tape;
      const ad::Var loss = ad::mse(model.forward(tape, ParamSource(params), bg), tape.constant(labels));
      const double value = loss.value()[0];
      if (!std::isfinite(value)) {
        std::ostringstream os;
        os << "training diverged: non-finite loss at epoch " << epoch << ", batch starting at sample " << begin;
        throw NumericError(os.str());
      }
      tape.backward(loss);
      ad::adam_step(params, adam);
      loss_sum += value * static_cast<double>(end - begin);
      loss_count += end - begin;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_mse = loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0;
    const Evaluation val = evaluate_with(model, params, result.normalizer, data, factory, split.validation,
                                         split.eval_slots, config.val_stride);
    rec.val_rmse = val.metrics.rmse;
    rec.val_mape = val.metrics.mape;
    if (!std::isfinite(rec.val_rmse)) throw NumericError("training diverged: non-finite validation RMSE");
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);

    if (rec.val_rmse < best_rmse) {
      best_rmse = rec.val_rmse;
      best = params;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  result.params = std::move(best);
  result.best_val_rmse = best_rmse;
  return result;
}

}  // namespace moher

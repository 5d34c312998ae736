// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include "moher/toy.hpp"

#include "moher/rng.hpp"
#include "moher/sampler.hpp"

namespace moher {

ToyInstance make_toy_instance(std::uint64_t seed, const ModelConfig& config, std::size_t max_nodes,
                              const EdgeParams& edges) {
  if (max_nodes == 0) throw InvalidInput("toy instance needs at least one node");
  Rng rng(seed);
  ToyInstance toy;
  const std::size_t n = max_nodes + 2;  // a few extra candidates beyond the budget
  for (std::size_t i = 0; i < n; ++i) {
    Site s;
    s.uid = static_cast<SiteUid>(i);
    s.mode = static_cast<ModeId>(rng.below(config.mode_count));
    s.coord = {rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0)};
    s.poi.resize(4);
    for (double& p : s.poi) p = rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.0, 5.0);
    toy.sites.push_back(std::move(s));
  }
  toy.sites[0].recorded = false;

  auto window = std::make_shared<GraphWindow>();
  window->target = 0;
  window->end_slot = config.window - 1;
  for (std::size_t slot = 0; slot < config.window; ++slot) {
    std::vector<const Site*> recorded;
    const std::size_t dropped = 1 + rng.below(n - 1);
    for (std::size_t i = 1; i < n; ++i) {
      if (i != dropped || slot % 2 == 0) recorded.push_back(&toy.sites[i]);
    }
    window->slots.push_back(build_localized_graph(toy.sites[0], recorded, max_nodes - 1, edges, slot));
    ad::Tensor x(window->slots.back().nodes.size() - 1, config.input_dim);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = rng.normal();
    toy.sample.features.push_back(std::move(x));
  }
  toy.sample.window = std::move(window);
  toy.sample.label.resize(config.input_dim);
  for (double& y : toy.sample.label) y = rng.normal();
  return toy;
}

ad::GradCheckReport check_model_gradients(const ModelConfig& config, const ToyInstance& toy,
                                          std::uint64_t param_seed, const ad::GradCheckOptions& options) {
  const MoherModel model(config);
  ad::ParamStore params;
  model.init_params(params, param_seed);
  // Move off the zero biases of a fresh model so every branch is exercised.
  Rng rng(mix64(param_seed));
  for (auto& [name, p] : params) {
    for (double& v : p.value.values()) v += 0.1 * rng.normal();
  }
  const WindowSample* one[] = {&toy.sample};
  const BatchGraph bg = compile_batch(one, config);
  ad::Tensor label(1, config.input_dim);
  for (std::size_t k = 0; k < label.size(); ++k) label[k] = toy.sample.label[k];
  return ad::grad_check(
      params,
      [&](ad::Tape& tape, ad::ParamStore& store) {
        return ad::mse(model.forward(tape, ParamSource(store), bg), tape.constant(label));
      },
      options);
}

}  // namespace moher

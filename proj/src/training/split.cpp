// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include <algorithm>

#include "moher/rng.hpp"
#include "moher/training.hpp"

namespace moher {

SplitPlan make_split(const Dataset& data, std::uint64_t seed) {
  const std::size_t n = data.sites.size();
  if (n < 10) throw DataError("split needs at least 10 sites, dataset has " + std::to_string(n));
  if (data.slot_count < 2) throw DataError("split needs at least 2 slots");
  std::vector<SiteUid> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = data.sites[i].uid;
  Rng rng(seed);
  rng.shuffle(order);

  const std::size_t n_val = n / 5;
  const std::size_t n_test = n / 10;
  SplitPlan plan;
  plan.seed = seed;
  plan.validation.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  plan.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_val),
                   order.begin() + static_cast<std::ptrdiff_t>(n_val + n_test));
  plan.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_val + n_test), order.end());
  std::sort(plan.train.begin(), plan.train.end());
  std::sort(plan.validation.begin(), plan.validation.end());
  std::sort(plan.test.begin(), plan.test.end());

  const std::size_t cut = data.slot_count * 3 / 5;
  plan.train_slots = {0, cut};
  plan.eval_slots = {cut, data.slot_count};
  return plan;
}

}  // namespace moher

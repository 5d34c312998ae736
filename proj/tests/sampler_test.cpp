// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "moher/sampler.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace moher {
namespace {

void expect_same_graph(const LocalizedGraph& a, const LocalizedGraph& b) {
  ASSERT_EQ(a.nodes, b.nodes);
  ASSERT_EQ(a.modes, b.modes);
  ASSERT_EQ(a.edges.size(), b.edges.size());
  for (std::size_t k = 0; k < a.edges.size(); ++k) {
    EXPECT_EQ(a.edges[k].i, b.edges[k].i);
    EXPECT_EQ(a.edges[k].j, b.edges[k].j);
    EXPECT_EQ(a.edges[k].rel, b.edges[k].rel);
    EXPECT_EQ(a.edges[k].weight, b.edges[k].weight);
  }
}

TEST(LocalizedGraph, MatchesNaiveTranscription) {
  std::mt19937_64 rng(2024);
  for (int instance = 0; instance < 50; ++instance) {
    const std::size_t n = 2 + rng() % 29;
    const std::size_t modes = 1 + rng() % 3;
    auto sites = testing::random_sites(rng, n, modes, 1.0 + static_cast<double>(rng() % 4));
    const Site target = sites.front();
    std::vector<Site> recorded(sites.begin() + 1, sites.end());
    std::vector<const Site*> ptrs;
    for (const Site& s : recorded) ptrs.push_back(&s);
    const std::size_t budget = rng() % 12;
    const EdgeParams params{0.6 + 0.1 * static_cast<double>(rng() % 8), 0.3 + 0.1 * static_cast<double>(rng() % 5),
                            rng() % 5 != 0};
    SCOPED_TRACE("instance " + std::to_string(instance));
    expect_same_graph(build_localized_graph(target, ptrs, budget, params),
                      testing::naive_localized_graph(target, recorded, budget, params));
  }
}

TEST(LocalizedGraph, Invariants) {
  std::mt19937_64 rng(5);
  for (int instance = 0; instance < 30; ++instance) {
    auto sites = testing::random_sites(rng, 25, 3, 3.0);
    std::vector<const Site*> ptrs;
    for (std::size_t k = 1; k < sites.size(); ++k) ptrs.push_back(&sites[k]);
    const std::size_t budget = 1 + rng() % 10;
    const LocalizedGraph g = build_localized_graph(sites[0], ptrs, budget, {1.0, 0.5, true});
    ASSERT_FALSE(g.nodes.empty());
    EXPECT_EQ(g.nodes.front(), sites[0].uid);
    EXPECT_LE(g.nodes.size(), budget + 1);
    // Each admitted node is connected to some earlier node.
    for (std::size_t k = 1; k < g.nodes.size(); ++k) {
      bool linked = false;
      for (const Edge& e : g.edges) {
        if (!e.touches(g.nodes[k])) continue;
        const auto other = g.index_of(e.other(g.nodes[k]));
        linked = linked || (other && *other < k && e.weight > 0.0);
      }
      EXPECT_TRUE(linked) << "node " << k;
    }
    for (const Edge& e : g.edges) {
      EXPECT_TRUE(g.index_of(e.i).has_value());
      EXPECT_TRUE(g.index_of(e.j).has_value());
    }
  }
}

TEST(LocalizedGraph, Examples) {
  std::mt19937_64 rng(9);
  auto sites = testing::random_sites(rng, 10, 2, 0.5);
  std::vector<const Site*> ptrs;
  for (std::size_t k = 1; k < sites.size(); ++k) ptrs.push_back(&sites[k]);
  const LocalizedGraph zero = build_localized_graph(sites[0], ptrs, 0, {1.0, 0.5, true});
  EXPECT_EQ(zero.nodes, std::vector<SiteUid>{0});
  EXPECT_TRUE(zero.edges.empty());

  Site lonely = sites[0];
  lonely.coord = {100, 100};
  lonely.poi.assign(lonely.poi.size(), 0.0);
  const LocalizedGraph alone = build_localized_graph(lonely, ptrs, 10, {1.0, 0.5, true});
  EXPECT_EQ(alone.nodes.size(), 1u);
  EXPECT_EQ(build_localized_graph(sites[0], {}, 5, {1.0, 0.5, true}).nodes.size(), 1u);

  std::vector<const Site*> with_target = ptrs;
  with_target.push_back(&sites[0]);
  EXPECT_THROW(build_localized_graph(sites[0], with_target, 3, {1.0, 0.5, true}), InvalidInput);
}

TEST(LocalizedGraph, LineWithDecreasingWeights) {
  // Target at the origin, sites on a line at growing distance: geo order wins.
  std::vector<Site> line(5);
  for (int k = 0; k < 5; ++k) {
    line[k].uid = k;
    line[k].coord = {0.15 * k, 0.0};
    line[k].poi = {1.0};
  }
  std::vector<const Site*> ptrs{&line[3], &line[1], &line[4], &line[2]};
  const LocalizedGraph g = build_localized_graph(line[0], ptrs, 10, {1.0, 0.5, false});
  EXPECT_EQ(g.nodes, (std::vector<SiteUid>{0, 1, 2, 3, 4}));
  // Every pair is within range, so the graph is complete.
  EXPECT_EQ(g.edges.size(), 10u);
}

TEST(GraphWindow, OpeningSiteAndStaticPopulation) {
  std::mt19937_64 rng(4);
  auto sites = testing::random_sites(rng, 6, 2, 0.5);
  Dataset d = testing::make_dataset(sites, 2, 4, rng);
  // Site 5 opens at slot 2.
  d.flows[5].start_slot = 2;
  d.flows[5].values.resize(2 * 2);
  const std::vector<SiteUid> pool{1, 2, 3, 4, 5};
  const GraphWindow w = build_graph_window(d.sites[0], d, pool, 3, 4, 10, {1.0, 0.3, true});
  ASSERT_EQ(w.slots.size(), 4u);
  for (std::size_t s = 0; s < 4; ++s) {
    EXPECT_EQ(w.slots[s].slot, s);
    EXPECT_EQ(w.slots[s].index_of(5).has_value(), s >= 2);
  }
  EXPECT_EQ(w.slots[0].nodes, w.slots[1].nodes);

  const GraphWindow one = build_graph_window(d.sites[0], d, pool, 1, 1, 10, {1.0, 0.3, true});
  EXPECT_EQ(one.slots.size(), 1u);
  EXPECT_THROW(build_graph_window(d.sites[0], d, pool, 1, 3, 10, {1.0, 0.3, true}), RangeError);
  EXPECT_THROW(build_graph_window(d.sites[0], d, pool, 4, 2, 10, {1.0, 0.3, true}), RangeError);
}

TEST(GraphWindow, Deterministic) {
  std::mt19937_64 rng(8);
  auto sites = testing::random_sites(rng, 20, 3, 2.0);
  const Dataset d = testing::make_dataset(sites, 3, 5, rng);
  std::vector<SiteUid> pool;
  for (SiteUid k = 1; k < 20; ++k) pool.push_back(k);
  const GraphWindow a = build_graph_window(d.sites[0], d, pool, 4, 3, 6, {1.0, 0.5, true});
  const GraphWindow b = build_graph_window(d.sites[0], d, pool, 4, 3, 6, {1.0, 0.5, true});
  for (std::size_t s = 0; s < 3; ++s) expect_same_graph(a.slots[s], b.slots[s]);
}

}  // namespace
}  // namespace moher

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include <cmath>
#include <set>
#include <unordered_set>

#include "moher/graph.hpp"

namespace moher {

std::span<const double> FlowSeries::at(std::size_t slot) const {
  if (!active(slot)) throw RangeError("slot " + std::to_string(slot) + " outside flow series");
  return {values.data() + (slot - start_slot) * dim, dim};
}

std::span<double> FlowSeries::at(std::size_t slot) {
  if (!active(slot)) throw RangeError("slot " + std::to_string(slot) + " outside flow series");
  return {values.data() + (slot - start_slot) * dim, dim};
}

const Site& Dataset::site(SiteUid uid) const {
  if (uid < 0 || static_cast<std::size_t>(uid) >= sites.size()) {
    throw DataError("unknown site uid " + std::to_string(uid));
  }
  return sites[static_cast<std::size_t>(uid)];
}

const FlowSeries& Dataset::flow(SiteUid uid) const {
  if (uid < 0 || static_cast<std::size_t>(uid) >= flows.size()) {
    throw DataError("no flow series for site uid " + std::to_string(uid));
  }
  return flows[static_cast<std::size_t>(uid)];
}

std::optional<ModeId> Dataset::find_mode(std::string_view name) const {
  for (const auto& m : modes) {
    if (m.name == name) return m.id;
  }
  return std::nullopt;
}

std::optional<SiteUid> Dataset::find_site(std::string_view name) const {
  for (const auto& s : sites) {
    if (s.name == name) return s.uid;
  }
  return std::nullopt;
}

void Dataset::validate() const {
  std::set<std::string> mode_names;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    if (modes[k].id != k) throw DataError("mode ids must be dense 0..|P|-1");
    if (!mode_names.insert(modes[k].name).second) {
      throw DataError("duplicate mode name '" + modes[k].name + "'");
    }
  }
  if (flows.size() != sites.size()) {
    throw DataError("flow series count " + std::to_string(flows.size()) +
                    " does not match site count " + std::to_string(sites.size()));
  }
  std::unordered_set<std::string> names;
  const std::size_t poi = poi_dim();
  for (std::size_t k = 0; k < sites.size(); ++k) {
    const Site& s = sites[k];
    if (s.uid != static_cast<SiteUid>(k)) throw DataError("site uids must equal their index");
    if (!names.insert(s.name).second) throw DataError("duplicate site id '" + s.name + "'");
    if (s.mode >= modes.size()) throw DataError("site '" + s.name + "' has unknown mode");
    if (!std::isfinite(s.coord.x_km) || !std::isfinite(s.coord.y_km)) {
      throw DataError("site '" + s.name + "' has a non-finite coordinate");
    }
    if (s.poi.size() != poi) throw DataError("site '" + s.name + "' has a POI vector of wrong length");
    for (double c : s.poi) {
      if (!(c >= 0.0) || !std::isfinite(c)) {
        throw DataError("site '" + s.name + "' has a negative or non-finite POI count");
      }
    }
    const FlowSeries& f = flows[k];
    if (f.site != s.uid) throw DataError("flow series order does not match sites");
    if (f.dim != feature_dim) throw DataError("site '" + s.name + "' has wrong flow dimension");
    if (f.values.size() % f.dim != 0) throw DataError("site '" + s.name + "' has a ragged flow series");
    if (f.end_slot() > slot_count) throw DataError("site '" + s.name + "' has flows past slot_count");
    for (double v : f.values) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw DataError("site '" + s.name + "' has a negative or non-finite flow value");
      }
    }
  }
}

std::size_t mean_two_hop_geo_neighborhood(const Dataset& data, std::span<const SiteUid> pool,
                                          double gamma_km) {
  if (pool.empty()) return 0;
  std::vector<std::vector<std::size_t>> adj(pool.size());
  for (std::size_t a = 0; a < pool.size(); ++a) {
    for (std::size_t b = a + 1; b < pool.size(); ++b) {
      if (encode_geo(data.site(pool[a]), data.site(pool[b]), gamma_km) > 0.0) {
        adj[a].push_back(b);
        adj[b].push_back(a);
      }
    }
  }
  double total = 0.0;
  for (std::size_t a = 0; a < pool.size(); ++a) {
    std::unordered_set<std::size_t> reach(adj[a].begin(), adj[a].end());
    for (std::size_t b : adj[a]) reach.insert(adj[b].begin(), adj[b].end());
    reach.erase(a);
    total += static_cast<double>(reach.size());
  }
  return static_cast<std::size_t>(std::lround(total / static_cast<double>(pool.size())));
}

}  // namespace moher

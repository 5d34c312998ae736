// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "moher/graph.hpp"

namespace moher {

enum class Archetype : std::uint8_t { Residential = 0, Commercial = 1, Office = 2, Hub = 3 };
inline constexpr std::size_t kArchetypeCount = 4;
const char* to_string(Archetype a);

/// Synthetic multi-mode city. Each point takes the archetype of its nearest
/// zone. Latent demand is a flat background plus the archetype's demand
/// (scale, daily cycle, weekly factor, archetype-wide shock) weighted by
/// closeness to that zone. Each mode captures a fixed share of it. Sites of
/// different modes within `diversion_gamma_km` then pool a fraction kappa of
/// their demand and re-split it, which keeps the total unchanged.
struct SynthConfig {
  std::uint64_t seed = 7;
  std::vector<std::string> modes{"subway", "bike", "taxi"};
  std::vector<std::size_t> sites_per_mode{40, 40, 40};
  std::vector<double> capture{1.0, 0.5, 0.25};
  double plane_km = 8.0;
  std::size_t poi_categories = 8;
  std::size_t zones = 12;
  double zone_radius_km = 5.0;  // zone weight (1 - (d/R)^2)^2 inside R, 0 outside
  double background = 0.2;
  std::size_t slots = 600;
  std::size_t slots_per_day = 6;
  double amplitude = 100.0;
  double noise = 0.1;  // std of shocks and site noise, relative to amplitude
  double kappa = 0.5;
  double diversion_gamma_km = 1.0;

  void validate() const;
};

struct SynthCity {
  Dataset data;
  std::vector<Archetype> archetypes;  // per site
  std::size_t clamped = 0;            // demand values clamped at zero
};

SynthCity generate(const SynthConfig& config);

/// Archetype of the zone nearest to `p`.
Archetype archetype_at(const SynthConfig& config, const Point& p);
/// POI counts the generator would give a site at `p` (noise keyed by `uid`).
std::vector<double> synth_poi(const SynthConfig& config, const Point& p, SiteUid uid);
/// A site that was never materialized, with generator-consistent POI.
Site make_hypothetical_site(const SynthConfig& config, ModeId mode, const Point& p, SiteUid uid = -1);

/// Pre-diversion demand of a site at `slot`; site noise is keyed by uid.
std::vector<double> latent_demand(const SynthConfig& config, const Site& site, std::size_t slot,
                                  bool with_site_noise);

/// Flow the generator would record at `slot` for `site` if it opened among
/// the materialized sites: its noise-free demand, diverted with every
/// generated site as well as itself.
std::vector<double> ground_truth_flow(const SynthConfig& config, const Site& site, std::size_t slot);

}  // namespace moher

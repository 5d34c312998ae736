// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "moher/rng.hpp"
#include "moher/synthcity.hpp"

namespace moher {

namespace {

constexpr std::uint64_t kStreamPoi = 0x706f69;
constexpr std::uint64_t kStreamSite = 0x73697465;
constexpr std::uint64_t kStreamShock = 0x73686f636b;
constexpr std::uint64_t kStreamProfile = 0x70726f66;

// Category order: food, retail, office, housing, education, leisure, transit, health.
constexpr std::array<std::array<double, 8>, kArchetypeCount> kProfiles{{
    {2.0, 1.0, 0.3, 6.0, 2.0, 1.0, 0.5, 1.0},
    {5.0, 6.0, 1.0, 1.0, 0.5, 3.0, 1.0, 1.0},
    {2.0, 1.0, 6.0, 0.5, 0.5, 0.5, 1.0, 1.0},
    {3.0, 3.0, 2.0, 1.0, 0.5, 1.0, 6.0, 0.5},
}};

// Peak slot-of-day (of 6) for inflow and outflow.
constexpr std::array<std::array<double, 2>, kArchetypeCount> kPeaks{{
    {4.0, 1.5},
    {3.5, 4.5},
    {1.5, 4.0},
    {2.0, 3.0},
}};

constexpr std::array<double, kArchetypeCount> kWeekend{1.0, 1.25, 0.45, 0.85};
constexpr std::array<double, kArchetypeCount> kScale{0.8, 1.2, 1.0, 1.6};

struct Zone {
  Point center;
  Archetype archetype;
};

std::vector<Zone> make_zones(const SynthConfig& c) {
  Rng rng(mix64(c.seed ^ 0x7a6f6e6573ULL));
  std::vector<Zone> zones(c.zones);
  for (std::size_t z = 0; z < c.zones; ++z) {
    zones[z].center = {rng.uniform(0.0, c.plane_km), rng.uniform(0.0, c.plane_km)};
    // Every archetype appears; the rest are drawn at random.
    zones[z].archetype = static_cast<Archetype>(z < kArchetypeCount ? z : rng.below(kArchetypeCount));
  }
  return zones;
}

double dist2(const Point& a, const Point& b) {
  const double dx = a.x_km - b.x_km, dy = a.y_km - b.y_km;
  return dx * dx + dy * dy;
}

const Zone& nearest_zone(const std::vector<Zone>& zones, const Point& p) {
  std::size_t best = 0;
  for (std::size_t z = 1; z < zones.size(); ++z) {
    if (dist2(zones[z].center, p) < dist2(zones[best].center, p)) best = z;
  }
  return zones[best];
}

Archetype nearest_archetype(const std::vector<Zone>& zones, const Point& p) {
  return nearest_zone(zones, p).archetype;
}

double zone_weight(const SynthConfig& c, const Zone& z, const Point& p) {
  const double u = dist2(z.center, p) / (c.zone_radius_km * c.zone_radius_km);
  return u >= 1.0 ? 0.0 : (1.0 - u) * (1.0 - u);
}

double profile(const SynthConfig& c, Archetype a, std::size_t k) {
  if (k < 8) return kProfiles[static_cast<std::size_t>(a)][k];
  return 0.5 + 4.0 * counter_uniform(c.seed, kStreamProfile + static_cast<std::uint64_t>(a), k);
}

double shock(const SynthConfig& c, Archetype a, std::size_t slot) {
  return c.noise * counter_normal(c.seed, kStreamShock + static_cast<std::uint64_t>(a), slot);
}

std::uint64_t site_stream(SiteUid uid) { return kStreamSite ^ mix64(static_cast<std::uint64_t>(uid)); }

struct Layout {
  std::vector<Zone> zones;
};

std::vector<double> demand(const SynthConfig& c, const Layout& layout, const Site& site, std::size_t slot,
                           bool with_noise, std::size_t* clamped) {
  const Zone& zone = nearest_zone(layout.zones, site.coord);
  const Archetype a = zone.archetype;
  const double base = c.amplitude * c.capture.at(site.mode);
  const double local = zone_weight(c, zone, site.coord) * kScale[static_cast<std::size_t>(a)];
  const double per_day = static_cast<double>(c.slots_per_day);
  const double phase = static_cast<double>(slot % c.slots_per_day) * 6.0 / per_day;
  const bool weekend = (slot / c.slots_per_day) % 7 >= 5;
  const double week = weekend ? kWeekend[static_cast<std::size_t>(a)] : 1.0;
  const double s = 1.0 + shock(c, a, slot);
  std::vector<double> out(2);
  for (std::size_t ch = 0; ch < 2; ++ch) {
    const double peak = kPeaks[static_cast<std::size_t>(a)][ch];
    const double cycle = 1.0 + 0.8 * std::cos(2.0 * std::numbers::pi * (phase - peak) / 6.0);
    double v = c.background + local * cycle * week * s;
    if (with_noise) v += c.noise * counter_normal(c.seed, site_stream(site.uid), slot * 2 + ch);
    v *= base;
    if (v < 0.0) {
      v = 0.0;
      if (clamped != nullptr) ++*clamped;
    }
    out[ch] = v;
  }
  return out;
}

// Site placement shared by generate() and ground_truth_flow().
std::vector<Site> place_sites(const SynthConfig& c) {
  std::vector<Site> sites;
  Rng rng(mix64(c.seed ^ 0x706c616365ULL));
  for (std::size_t m = 0; m < c.modes.size(); ++m) {
    for (std::size_t k = 0; k < c.sites_per_mode[m]; ++k) {
      Site s;
      s.uid = static_cast<SiteUid>(sites.size());
      s.name = c.modes[m] + "_" + std::to_string(k);
      s.mode = static_cast<ModeId>(m);
      s.coord = {rng.uniform(0.0, c.plane_km), rng.uniform(0.0, c.plane_km)};
      sites.push_back(std::move(s));
    }
  }
  return sites;
}

// Demand is shared between sites of different modes only.
double overlap(const SynthConfig& c, const Site& a, const Site& b) {
  if (a.mode == b.mode) return 0.0;
  return encode_geo(a.coord, b.coord, c.diversion_gamma_km);
}

}  // namespace

const char* to_string(Archetype a) {
  switch (a) {
    case Archetype::Residential: return "residential";
    case Archetype::Commercial: return "commercial";
    case Archetype::Office: return "office";
    case Archetype::Hub: return "hub";
  }
  return "unknown";
}

void SynthConfig::validate() const {
  if (modes.empty()) throw InvalidInput("synth: at least one mode");
  if (sites_per_mode.size() != modes.size() || capture.size() != modes.size()) {
    throw InvalidInput("synth: sites_per_mode and capture need one entry per mode");
  }
  for (std::size_t n : sites_per_mode) {
    if (n == 0) throw InvalidInput("synth: every mode needs at least one site");
  }
  for (double r : capture) {
    if (!(r > 0.0)) throw InvalidInput("synth: capture rates must be positive");
  }
  if (!(plane_km > 0.0)) throw InvalidInput("synth: plane size must be positive");
  if (poi_categories == 0 || zones == 0 || slots == 0 || slots_per_day == 0) {
    throw InvalidInput("synth: poi_categories, zones, slots and slots_per_day must be positive");
  }
  if (!(amplitude > 0.0) || noise < 0.0) throw InvalidInput("synth: amplitude must be positive, noise non-negative");
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw InvalidInput("synth: kappa must lie in [0, 1]");
  if (!(diversion_gamma_km > 0.0)) throw InvalidInput("synth: diversion radius must be positive");
  if (!(zone_radius_km > 0.0) || background < 0.0) {
    throw InvalidInput("synth: zone radius must be positive, background non-negative");
  }
}

Archetype archetype_at(const SynthConfig& config, const Point& p) {
  return nearest_archetype(make_zones(config), p);
}

std::vector<double> synth_poi(const SynthConfig& config, const Point& p, SiteUid uid) {
  const Archetype a = archetype_at(config, p);
  std::vector<double> poi(config.poi_categories);
  for (std::size_t k = 0; k < poi.size(); ++k) {
    const double z = counter_normal(config.seed, kStreamPoi ^ mix64(static_cast<std::uint64_t>(uid)), k);
    poi[k] = 10.0 * profile(config, a, k) * std::exp(0.3 * z);
  }
  return poi;
}

Site make_hypothetical_site(const SynthConfig& config, ModeId mode, const Point& p, SiteUid uid) {
  if (mode >= config.modes.size()) throw InvalidInput("synth: unknown mode id " + std::to_string(mode));
  Site s;
  s.uid = uid;
  s.name = "new_" + std::to_string(uid < 0 ? -uid : uid);
  s.mode = mode;
  s.coord = p;
  s.poi = synth_poi(config, p, uid);
  s.recorded = false;
  return s;
}

SynthCity generate(const SynthConfig& config) {
  config.validate();
  const Layout layout{make_zones(config)};
  SynthCity city;
  Dataset& d = city.data;
  d.slot_count = config.slots;
  d.feature_dim = 2;
  d.slot_hours = 24 / std::max<std::size_t>(1, config.slots_per_day);
  for (std::size_t m = 0; m < config.modes.size(); ++m) d.modes.push_back({static_cast<ModeId>(m), config.modes[m]});

  d.sites = place_sites(config);
  for (Site& s : d.sites) {
    s.poi = synth_poi(config, s.coord, s.uid);
    city.archetypes.push_back(nearest_archetype(layout.zones, s.coord));
  }

  const std::size_t n = d.sites.size();
  // K[i][j] = o_ij / sum_k o_kj with o_jj = 1: the share of j's pooled
  // demand that lands at i.
  std::vector<std::vector<std::pair<std::size_t, double>>> into(n);
  std::vector<double> column(n, 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) column[j] += overlap(config, d.sites[k], d.sites[j]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    into[i].emplace_back(i, 1.0 / column[i]);
    for (std::size_t j = 0; j < n; ++j) {
      const double o = overlap(config, d.sites[i], d.sites[j]);
      if (o > 0.0) into[i].emplace_back(j, o / column[j]);
    }
  }

  d.flows.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.flows[i].site = d.sites[i].uid;
    d.flows[i].dim = 2;
    d.flows[i].values.assign(config.slots * 2, 0.0);
  }
  std::vector<std::vector<double>> dem(n);
  for (std::size_t t = 0; t < config.slots; ++t) {
    for (std::size_t i = 0; i < n; ++i) dem[i] = demand(config, layout, d.sites[i], t, true, &city.clamped);
    for (std::size_t i = 0; i < n; ++i) {
      double* out = d.flows[i].values.data() + t * 2;
      for (std::size_t ch = 0; ch < 2; ++ch) {
        double pooled = 0.0;
        for (const auto& [j, share] : into[i]) pooled += share * dem[j][ch];
        out[ch] = (1.0 - config.kappa) * dem[i][ch] + config.kappa * pooled;
      }
    }
  }
  d.validate();
  return city;
}

std::vector<double> latent_demand(const SynthConfig& config, const Site& site, std::size_t slot,
                                  bool with_site_noise) {
  config.validate();
  const Layout layout{make_zones(config)};
  return demand(config, layout, site, slot, with_site_noise, nullptr);
}

std::vector<double> ground_truth_flow(const SynthConfig& config, const Site& site, std::size_t slot) {
  config.validate();
  if (!(site.coord.x_km >= 0.0 && site.coord.x_km <= config.plane_km && site.coord.y_km >= 0.0 &&
        site.coord.y_km <= config.plane_km)) {
    throw InvalidInput("ground_truth_flow: site lies outside the synthetic plane");
  }
  if (site.mode >= config.modes.size()) throw InvalidInput("ground_truth_flow: unknown mode");
  const Layout layout{make_zones(config)};
  const std::vector<Site> sites = place_sites(config);

  const std::vector<double> own = demand(config, layout, site, slot, false, nullptr);
  std::vector<double> pooled(2, 0.0);
  // Column sums over the generated sites plus the new one, o_jj = 1.
  auto column_with_new = [&](const Site& j, bool is_new) {
    double col = 1.0 + (is_new ? 0.0 : overlap(config, site, j));
    for (const Site& k : sites) col += overlap(config, k, j);
    return col;
  };
  {
    const double share = 1.0 / column_with_new(site, true);
    for (std::size_t ch = 0; ch < 2; ++ch) pooled[ch] += share * own[ch];
  }
  for (const Site& j : sites) {
    const double o = overlap(config, site, j);
    if (o <= 0.0) continue;
    const std::vector<double> dj = demand(config, layout, j, slot, true, nullptr);
    const double share = o / column_with_new(j, false);
    for (std::size_t ch = 0; ch < 2; ++ch) pooled[ch] += share * dj[ch];
  }
  std::vector<double> out(2);
  for (std::size_t ch = 0; ch < 2; ++ch) out[ch] = (1.0 - config.kappa) * own[ch] + config.kappa * pooled[ch];
  return out;
}

}  // namespace moher

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "moher/common.hpp"

namespace moher {

struct Point {
  double x_km = 0.0;
  double y_km = 0.0;
};

struct Mode {
  ModeId id = 0;
  std::string name;
};

struct Site {
  SiteUid uid = 0;
  std::string name;
  ModeId mode = 0;
  Point coord;
  std::vector<double> poi;  // per-category counts
  bool recorded = true;
};

/// Per-site flow records, slot-major with `dim` channels per slot.
struct FlowSeries {
  SiteUid site = 0;
  std::size_t start_slot = 0;
  std::size_t dim = 2;
  std::vector<double> values;

  std::size_t length() const { return dim == 0 ? 0 : values.size() / dim; }
  std::size_t end_slot() const { return start_slot + length(); }
  bool active(std::size_t slot) const { return slot >= start_slot && slot < end_slot(); }
  std::span<const double> at(std::size_t slot) const;
  std::span<double> at(std::size_t slot);
};

enum class RelationKind : std::uint8_t { Geo = 0, Poi = 1 };

/// Unordered mode pair crossed with a relation kind. Comparison follows the
/// canonical (mode_a, mode_b, kind) ordering.
struct RelationType {
  ModeId mode_a = 0;
  ModeId mode_b = 0;
  RelationKind kind = RelationKind::Geo;

  static RelationType between(ModeId x, ModeId y, RelationKind kind) {
    return x <= y ? RelationType{x, y, kind} : RelationType{y, x, kind};
  }
  friend auto operator<=>(const RelationType&, const RelationType&) = default;
};

std::string to_string(const RelationType& rel, std::span<const Mode> modes);

/// Undirected weighted edge; stored with i < j.
struct Edge {
  SiteUid i = 0;
  SiteUid j = 0;
  RelationType rel;
  double weight = 0.0;

  SiteUid other(SiteUid s) const { return s == i ? j : i; }
  bool touches(SiteUid s) const { return s == i || s == j; }
};

struct EdgeParams {
  double gamma_km = 1.0;  // geo-proximity cutoff
  double beta = 0.8;      // POI cosine threshold
  bool use_poi = true;
};

/// Gaussian proximity kernel with hard cutoff: exp(-(d/gamma)^2) for d <= gamma.
double encode_geo(const Point& a, const Point& b, double gamma_km);
double encode_geo(const Site& a, const Site& b, double gamma_km);

/// Thresholded cosine similarity of POI vectors, mapped affinely from
/// [beta, 1] onto [0, 1]. All-zero vectors have similarity 0.
double encode_poi(std::span<const double> a, std::span<const double> b, double beta);
double encode_poi(const Site& a, const Site& b, double beta);

/// All unordered mode pairs (including self pairs) crossed with `rho` kinds,
/// in canonical order. Length is |P|(|P|+1)rho/2.
std::vector<RelationType> enumerate_relation_types(std::size_t mode_count, std::size_t rho = 2);

/// Position of `rel` inside enumerate_relation_types(mode_count, rho).
std::size_t relation_index(const RelationType& rel, std::size_t mode_count, std::size_t rho = 2);

/// Zero, one or two edges between two distinct sites.
std::vector<Edge> build_edge(const Site& a, const Site& b, const EdgeParams& params);

/// The (M+1)-node heterogeneous snapshot around a target. Node 0 is the target.
struct LocalizedGraph {
  SiteUid target = 0;
  std::vector<SiteUid> nodes;
  std::vector<ModeId> modes;  // parallel to nodes
  std::vector<Edge> edges;
  std::size_t slot = 0;

  std::optional<std::size_t> index_of(SiteUid uid) const;
};

/// Multi-mode dataset. `sites[k].uid == k` and `flows[k]` belongs to `sites[k]`.
struct Dataset {
  std::vector<Mode> modes;
  std::vector<Site> sites;
  std::vector<FlowSeries> flows;
  std::size_t slot_count = 0;
  std::size_t feature_dim = 2;
  std::size_t slot_hours = 4;

  std::size_t poi_dim() const { return sites.empty() ? 0 : sites.front().poi.size(); }
  const Site& site(SiteUid uid) const;
  const FlowSeries& flow(SiteUid uid) const;
  std::optional<ModeId> find_mode(std::string_view name) const;
  std::optional<SiteUid> find_site(std::string_view name) const;

  /// Throws DataError when a documented invariant does not hold.
  void validate() const;
};

/// Mean size of first- plus second-order geo neighborhoods over `pool`,
/// rounded to the nearest integer; the default neighbor budget M.
std::size_t mean_two_hop_geo_neighborhood(const Dataset& data, std::span<const SiteUid> pool,
                                          double gamma_km);

}  // namespace moher

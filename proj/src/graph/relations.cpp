// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include <algorithm>
#include <cmath>

#include "moher/graph.hpp"
#include "moher/kernels.hpp"

namespace moher {

std::string to_string(const RelationType& rel, std::span<const Mode> modes) {
  auto name = [&](ModeId id) {
    return id < modes.size() ? modes[id].name : "mode" + std::to_string(id);
  };
  std::string kind;
  switch (rel.kind) {
    case RelationKind::Geo: kind = "geo"; break;
    case RelationKind::Poi: kind = "poi"; break;
    default: kind = "kind" + std::to_string(static_cast<int>(rel.kind)); break;
  }
  return name(rel.mode_a) + "-" + name(rel.mode_b) + ":" + kind;
}

double encode_geo(const Point& a, const Point& b, double gamma_km) {
  if (!std::isfinite(a.x_km) || !std::isfinite(a.y_km) || !std::isfinite(b.x_km) ||
      !std::isfinite(b.y_km)) {
    throw InvalidInput("encode_geo: non-finite coordinate");
  }
  if (!(gamma_km > 0.0)) throw InvalidInput("encode_geo: gamma must be positive");
  const double dis = std::hypot(a.x_km - b.x_km, a.y_km - b.y_km);
  if (dis > gamma_km) return 0.0;
  const double scaled = dis / gamma_km;
  return std::exp(-scaled * scaled);
}

double encode_geo(const Site& a, const Site& b, double gamma_km) {
  return encode_geo(a.coord, b.coord, gamma_km);
}

double encode_poi(std::span<const double> a, std::span<const double> b, double beta) {
  if (a.size() != b.size()) {
    throw InvalidInput("encode_poi: POI vectors differ in length (" + std::to_string(a.size()) +
                       " vs " + std::to_string(b.size()) + ")");
  }
  if (!(beta >= 0.0 && beta < 1.0)) throw InvalidInput("encode_poi: beta must lie in [0, 1)");
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] < 0.0 || b[k] < 0.0 || !std::isfinite(a[k]) || !std::isfinite(b[k])) {
      throw InvalidInput("encode_poi: POI counts must be finite and non-negative");
    }
  }
  const auto& kern = kernels::active();
  const double na = kern.dot(a.size(), a.data(), a.data());
  const double nb = kern.dot(b.size(), b.data(), b.data());
  if (na == 0.0 || nb == 0.0) return 0.0;
  const double cosine = std::min(1.0, kern.dot(a.size(), a.data(), b.data()) /
                                          (std::sqrt(na) * std::sqrt(nb)));
  if (cosine < beta) return 0.0;
  return (cosine - beta) / (1.0 - beta);
}

double encode_poi(const Site& a, const Site& b, double beta) {
  return encode_poi(a.poi, b.poi, beta);
}

std::vector<RelationType> enumerate_relation_types(std::size_t mode_count, std::size_t rho) {
  std::vector<RelationType> out;
  out.reserve(mode_count * (mode_count + 1) * rho / 2);
  for (ModeId a = 0; a < mode_count; ++a) {
    for (ModeId b = a; b < mode_count; ++b) {
      for (std::size_t k = 0; k < rho; ++k) {
        out.push_back({a, b, static_cast<RelationKind>(k)});
      }
    }
  }
  return out;
}

std::size_t relation_index(const RelationType& rel, std::size_t mode_count, std::size_t rho) {
  const std::size_t a = rel.mode_a;
  const std::size_t b = rel.mode_b;
  const auto kind = static_cast<std::size_t>(rel.kind);
  if (a > b || b >= mode_count || kind >= rho) {
    throw MissingRelation("relation (" + std::to_string(a) + "," + std::to_string(b) + "," +
                          std::to_string(kind) + ") is not in the canonical set");
  }
  // Pairs before row a: sum_{k<a} (P - k).
  const std::size_t rows_before = a == 0 ? 0 : a * mode_count - a * (a - 1) / 2;
  const std::size_t pair = rows_before + (b - a);
  return pair * rho + kind;
}

std::vector<Edge> build_edge(const Site& a, const Site& b, const EdgeParams& params) {
  if (a.uid == b.uid) throw InvalidInput("build_edge: endpoints must differ");
  std::vector<Edge> out;
  const SiteUid lo = std::min(a.uid, b.uid);
  const SiteUid hi = std::max(a.uid, b.uid);
  const double geo = encode_geo(a, b, params.gamma_km);
  if (geo > 0.0) out.push_back({lo, hi, RelationType::between(a.mode, b.mode, RelationKind::Geo), geo});
  if (params.use_poi) {
    const double poi = encode_poi(a, b, params.beta);
    if (poi > 0.0) {
      out.push_back({lo, hi, RelationType::between(a.mode, b.mode, RelationKind::Poi), poi});
    }
  }
  return out;
}

std::optional<std::size_t> LocalizedGraph::index_of(SiteUid uid) const {
  const auto it = std::find(nodes.begin(), nodes.end(), uid);
  if (it == nodes.end()) return std::nullopt;
  return static_cast<std::size_t>(it - nodes.begin());
}

}  // namespace moher

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include <algorithm>
#include <cstring>

#include "moher/model.hpp"

namespace moher {

namespace {

bool usable(const Edge& e, const ModelConfig& config) {
  if (!config.use_poi && e.rel.kind == RelationKind::Poi) return false;
  if (!config.use_cross_mode && e.rel.mode_a != e.rel.mode_b) return false;
  return true;
}

// Appends one instance; `row0` is the batch row of graph node 1.
void add_instance(BatchGraph& bg, std::size_t instance, const LocalizedGraph& graph,
                  const ad::Tensor& features, std::size_t row0, const ModelConfig& config) {
  const std::size_t n = graph.nodes.size();
  if (n == 0 || graph.nodes.front() != graph.target) {
    throw InvalidInput("localized graph must list its target first");
  }
  const std::size_t d0 = config.input_dim;
  if (n > 1 && (features.rank() != 2 || features.rows() != n - 1 || features.cols() != d0)) {
    throw ShapeError("features " + features.shape_string() + " do not match a graph of " +
                     std::to_string(n - 1) + " non-target nodes with " + std::to_string(d0) +
                     " channels");
  }
  if (n > 1) {
    std::memcpy(bg.features.data() + row0 * d0, features.data(), features.size() * sizeof(double));
  }

  const std::size_t rel_count = config.relation_count();
  // Neighbor counts per (node, relation), target excluded.
  std::vector<std::size_t> degree(n * rel_count, 0);
  struct Local {
    std::size_t a, b, rel;
    double w;
  };
  std::vector<Local> local;
  std::vector<double> best(rel_count, 0.0);
  std::vector<SiteUid> best_uid(rel_count, 0);
  std::vector<std::int64_t> best_row(rel_count, -1);

  for (const Edge& e : graph.edges) {
    if (!usable(e, config)) continue;
    const auto ia = graph.index_of(e.i);
    const auto ib = graph.index_of(e.j);
    if (!ia || !ib) throw InvalidInput("edge endpoint outside the localized graph");
    const std::size_t r = relation_index(e.rel, config.mode_count);
    if (*ia == 0 || *ib == 0) {
      const std::size_t other = *ia == 0 ? *ib : *ia;
      const SiteUid uid = graph.nodes[other];
      if (best_row[r] < 0 || e.weight > best[r] || (e.weight == best[r] && uid < best_uid[r])) {
        best[r] = e.weight;
        best_uid[r] = uid;
        best_row[r] = static_cast<std::int64_t>(row0 + other - 1);
      }
      continue;
    }
    ++degree[*ia * rel_count + r];
    ++degree[*ib * rel_count + r];
    local.push_back({*ia, *ib, r, e.weight});
  }

  for (const Local& l : local) {
    auto& m = bg.messages[l.rel];
    const auto ra = static_cast<std::int64_t>(row0 + l.a - 1);
    const auto rb = static_cast<std::int64_t>(row0 + l.b - 1);
    m.dst.push_back(ra);
    m.src.push_back(rb);
    m.weight.push_back(l.w / static_cast<double>(degree[l.a * rel_count + l.rel]));
    m.dst.push_back(rb);
    m.src.push_back(ra);
    m.weight.push_back(l.w / static_cast<double>(degree[l.b * rel_count + l.rel]));
  }

  bool any = false;
  for (std::size_t r = 0; r < rel_count; ++r) {
    bg.target_src[instance * rel_count + r] = best_row[r];
    bg.target_weight[instance * rel_count + r] = best_row[r] < 0 ? 0.0 : best[r];
    any = any || best_row[r] >= 0;
  }
  bg.isolated[instance] = !any;
}

BatchGraph empty_batch(std::size_t batch, std::size_t window, std::size_t rows,
                       const ModelConfig& config) {
  BatchGraph bg;
  bg.batch = batch;
  bg.window = window;
  bg.node_rows = rows;
  bg.features = ad::Tensor(rows, config.input_dim);
  bg.messages.resize(config.relation_count());
  bg.target_src.assign(batch * window * config.relation_count(), -1);
  bg.target_weight.assign(batch * window * config.relation_count(), 0.0);
  bg.isolated.assign(batch * window, true);
  return bg;
}

}  // namespace

BatchGraph compile_batch(std::span<const WindowSample* const> samples, const ModelConfig& config) {
  if (samples.empty()) throw InvalidInput("compile_batch: empty batch");
  const std::size_t window = config.window;
  std::size_t rows = 0;
  for (const WindowSample* s : samples) {
    if (!s->window || s->window->slots.size() != window || s->features.size() != window) {
      throw ShapeError("sample window length does not match the configured " + std::to_string(window) +
                       " slots");
    }
    for (const LocalizedGraph& g : s->window->slots) rows += g.nodes.size() - 1;
  }
  BatchGraph bg = empty_batch(samples.size(), window, rows, config);
  std::size_t row = 0;
  for (std::size_t s = 0; s < window; ++s) {
    for (std::size_t b = 0; b < samples.size(); ++b) {
      const LocalizedGraph& g = samples[b]->window->slots[s];
      add_instance(bg, s * samples.size() + b, g, samples[b]->features[s], row, config);
      row += g.nodes.size() - 1;
    }
  }
  return bg;
}

BatchGraph compile_graph(const LocalizedGraph& graph, const ad::Tensor& features,
                         const ModelConfig& config) {
  if (graph.nodes.empty()) throw InvalidInput("compile_graph: empty graph");
  BatchGraph bg = empty_batch(1, 1, graph.nodes.size() - 1, config);
  add_instance(bg, 0, graph, features, 0, config);
  return bg;
}

}  // namespace moher

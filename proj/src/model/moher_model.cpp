// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include <cmath>
#include <numeric>

#include "moher/model.hpp"
#include "moher/rng.hpp"

namespace moher {

namespace {

ad::Tensor glorot(std::size_t fan_in, std::size_t fan_out, std::size_t rows, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  ad::Tensor t(rows, fan_in * fan_out);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-limit, limit);
  return t;
}

ad::Tensor coefficients(std::size_t relations, std::size_t q, Rng& rng) {
  const double limit = std::sqrt(3.0 / static_cast<double>(q));
  ad::Tensor t(relations, q);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-limit, limit);
  return t;
}

const char* branch_tag(Branch b) { return b == Branch::Correlation ? "corr" : "diff"; }

}  // namespace

std::size_t ModelConfig::embedding_dim() const {
  return std::accumulate(hidden_dims.begin(), hidden_dims.end(), std::size_t{0});
}

void ModelConfig::validate() const {
  if (mode_count == 0) throw InvalidInput("model config: at least one mode is required");
  if (input_dim == 0) throw InvalidInput("model config: input_dim must be positive");
  if (hidden_dims.empty()) throw InvalidInput("model config: at least one relational layer is required");
  for (std::size_t d : hidden_dims) {
    if (d == 0) throw InvalidInput("model config: hidden dims must be positive");
  }
  if (basis_count == 0) throw InvalidInput("model config: basis_count must be positive");
  if (lstm_hidden == 0) throw InvalidInput("model config: lstm_hidden must be positive");
  if (window == 0) throw InvalidInput("model config: window must be positive");
}

MoherModel::MoherModel(ModelConfig config) : config_(std::move(config)) {
  config_.validate();
  relations_ = enumerate_relation_types(config_.mode_count);
}

std::string MoherModel::layer_name(std::size_t layer, const char* what) const {
  return "gcn" + std::to_string(layer) + "." + what;
}

void MoherModel::init_params(ad::ParamStore& store, std::uint64_t seed) const {
  Rng rng(seed);
  const std::size_t rel = relations_.size();
  const std::size_t q = config_.basis_count;
  for (std::size_t l = 0; l < config_.layers(); ++l) {
    const std::size_t din = config_.layer_input(l);
    const std::size_t dout = config_.hidden_dims[l];
    if (config_.use_basis_regularization) {
      store.add(layer_name(l, "basis_w"), glorot(din, dout, q, rng));
      store.add(layer_name(l, "basis_b"), ad::Tensor(q, dout));
      store.add(layer_name(l, "coef_w_corr"), coefficients(rel, q, rng));
      store.add(layer_name(l, "coef_b_corr"), coefficients(rel, q, rng));
      if (config_.use_differences) {
        store.add(layer_name(l, "coef_w_diff"), coefficients(rel, q, rng));
        store.add(layer_name(l, "coef_b_diff"), coefficients(rel, q, rng));
      }
    } else {
      store.add(layer_name(l, "w_corr"), glorot(din, dout, rel, rng));
      store.add(layer_name(l, "b_corr"), ad::Tensor(rel, dout));
      if (config_.use_differences) {
        store.add(layer_name(l, "w_diff"), glorot(din, dout, rel, rng));
        store.add(layer_name(l, "b_diff"), ad::Tensor(rel, dout));
      }
    }
    ad::Tensor self = glorot(din, dout, 1, rng);
    store.add(layer_name(l, "self_w"), ad::Tensor({din, dout}, {self.values().begin(), self.values().end()}));
  }
  init_lstm(store, "lstm", config_.target_dim(), config_.lstm_hidden, config_.input_dim, rng);
}

std::size_t MoherModel::layer_param_count(std::size_t layer) const {
  const std::size_t din = config_.layer_input(layer);
  const std::size_t dout = config_.hidden_dims.at(layer);
  const std::size_t rel = relations_.size();
  const std::size_t branches = config_.use_differences ? 2 : 1;
  if (config_.use_basis_regularization) {
    const std::size_t q = config_.basis_count;
    return q * (din * dout + dout) + 2 * branches * q * rel + din * dout;
  }
  return branches * rel * (din * dout + dout) + din * dout;
}

std::pair<ad::Var, ad::Var> MoherModel::reconstruct_weights(ad::Tape& tape, const ParamSource& params,
                                                            std::size_t layer, std::size_t relation,
                                                            Branch branch) const {
  if (relation >= relations_.size()) {
    throw MissingRelation("relation index " + std::to_string(relation) + " is not among the " +
                          std::to_string(relations_.size()) + " relation types");
  }
  if (branch == Branch::Difference && !config_.use_differences) {
    throw MissingRelation("difference branch is disabled in this configuration");
  }
  const std::size_t din = config_.layer_input(layer);
  const std::size_t dout = config_.hidden_dims.at(layer);
  const std::string tag = branch_tag(branch);
  if (config_.use_basis_regularization) {
    const ad::Var cw = ad::slice_rows(params.get(tape, layer_name(layer, ("coef_w_" + tag).c_str())), relation, 1);
    const ad::Var cb = ad::slice_rows(params.get(tape, layer_name(layer, ("coef_b_" + tag).c_str())), relation, 1);
    const ad::Var w = ad::reshape(ad::matmul(cw, params.get(tape, layer_name(layer, "basis_w"))), din, dout);
    const ad::Var b = ad::matmul(cb, params.get(tape, layer_name(layer, "basis_b")));
    return {w, b};
  }
  const ad::Var w = ad::reshape(
      ad::slice_rows(params.get(tape, layer_name(layer, ("w_" + tag).c_str())), relation, 1), din, dout);
  const ad::Var b = ad::slice_rows(params.get(tape, layer_name(layer, ("b_" + tag).c_str())), relation, 1);
  return {w, b};
}

std::pair<ad::Tensor, ad::Tensor> MoherModel::reconstruct_weights(const ad::ParamStore& params,
                                                                  std::size_t layer, std::size_t relation,
                                                                  Branch branch) const {
  ad::Tape tape;
  auto [w, b] = reconstruct_weights(tape, ParamSource(params), layer, relation, branch);
  return {w.value(), b.value()};
}

namespace {

// Per-message activations of one branch, before summation into nodes.
ad::Var branch_activations(const MoherModel& model, ad::Tape& tape, const ParamSource& params,
                           const BatchGraph::Messages& m, const ad::Var& x, std::size_t layer,
                           std::size_t relation, Branch branch) {
  auto [w, b] = model.reconstruct_weights(tape, params, layer, relation, branch);
  if (branch == Branch::Correlation) {
    const ad::Var scaled = ad::gather_rows(x, m.src, m.weight);
    return ad::relu(ad::add(ad::matmul(scaled, w), b));
  }
  // weight * |x_j - x_i| with weight > 0
  const ad::Var gap = ad::abs_elem(ad::sub(ad::gather_rows(x, m.src, m.weight), ad::gather_rows(x, m.dst, m.weight)));
  return ad::tanh(ad::add(ad::matmul(gap, w), b));
}

}  // namespace

ad::Var MoherModel::relation_messages(ad::Tape& tape, const ParamSource& params, const BatchGraph& graph,
                                      const ad::Var& x, std::size_t layer, std::size_t relation,
                                      Branch branch) const {
  const BatchGraph::Messages& m = graph.messages.at(relation);
  if (m.src.empty()) return ad::Var();
  const ad::Var act = branch_activations(*this, tape, params, m, x, layer, relation, branch);
  return ad::scatter_add_rows(act, m.dst, graph.node_rows);
}

ad::Var MoherModel::layer_forward(ad::Tape& tape, const ParamSource& params, const BatchGraph& graph,
                                  const ad::Var& x, std::size_t layer) const {
  ad::Var acc = ad::matmul(x, params.get(tape, layer_name(layer, "self_w")));
  std::vector<ad::Var> parts;
  std::vector<std::int64_t> dst;
  for (std::size_t r = 0; r < relations_.size(); ++r) {
    const BatchGraph::Messages& m = graph.messages[r];
    if (m.src.empty()) continue;
    parts.push_back(branch_activations(*this, tape, params, m, x, layer, r, Branch::Correlation));
    dst.insert(dst.end(), m.dst.begin(), m.dst.end());
    if (config_.use_differences) {
      parts.push_back(branch_activations(*this, tape, params, m, x, layer, r, Branch::Difference));
      dst.insert(dst.end(), m.dst.begin(), m.dst.end());
    }
  }
  if (!parts.empty()) {
    const ad::Var all = parts.size() == 1 ? parts.front() : ad::concat(parts, 0);
    acc = ad::add(acc, ad::scatter_add_rows(all, std::move(dst), graph.node_rows));
  }
  return ad::relu(acc);
}

ad::Var MoherModel::embed(ad::Tape& tape, const ParamSource& params, const BatchGraph& graph) const {
  ad::Var x = tape.constant(graph.features);
  std::vector<ad::Var> outputs;
  for (std::size_t l = 0; l < config_.layers(); ++l) {
    x = layer_forward(tape, params, graph, x, l);
    outputs.push_back(x);
  }
  return outputs.size() == 1 ? outputs.front() : ad::concat(outputs, 1);
}

ad::Var MoherModel::aggregate(ad::Tape&, const BatchGraph& graph, const ad::Var& embeddings) const {
  const ad::Var picked = ad::gather_rows(embeddings, graph.target_src, graph.target_weight);
  return ad::reshape(picked, graph.instances(), config_.target_dim());
}

ad::Var MoherModel::forward(ad::Tape& tape, const ParamSource& params, const BatchGraph& graph) const {
  if (graph.window != config_.window) {
    throw ShapeError("batch has " + std::to_string(graph.window) + " slots, model expects " +
                     std::to_string(config_.window));
  }
  const ad::Var h = aggregate(tape, graph, embed(tape, params, graph));
  std::vector<ad::Var> steps;
  steps.reserve(graph.window);
  for (std::size_t s = 0; s < graph.window; ++s) {
    steps.push_back(graph.window == 1 ? h : ad::slice_rows(h, s * graph.batch, graph.batch));
  }
  return lstm_forward(tape, params, "lstm", steps);
}

namespace {

BatchGraph structure_only(const LocalizedGraph& graph, const ModelConfig& config) {
  if (graph.nodes.empty()) throw InvalidInput("empty localized graph");
  return compile_graph(graph, ad::Tensor(graph.nodes.size() - 1, config.input_dim), config);
}

void check_rows(const ad::Tensor& x, const LocalizedGraph& graph) {
  if (x.rank() != 2 || x.rows() + 1 != graph.nodes.size()) {
    throw ShapeError("node features " + x.shape_string() + " do not match " +
                     std::to_string(graph.nodes.size() - 1) + " non-target nodes");
  }
}

ad::Tensor node_row(const ad::Var& v, std::size_t node, std::size_t cols) {
  if (!v.valid()) return ad::Tensor(1, cols);
  const auto row = v.value().row_span(node - 1);
  return ad::Tensor::row(row);
}

}  // namespace

ad::Tensor MoherModel::correlations(const ad::ParamStore& params, std::size_t layer,
                                    const LocalizedGraph& graph, const ad::Tensor& x, std::size_t node,
                                    std::size_t relation) const {
  check_rows(x, graph);
  if (node == 0 || node >= graph.nodes.size()) throw InvalidInput("node must be a non-target node index");
  const BatchGraph bg = structure_only(graph, config_);
  ad::Tape tape;
  const ad::Var msg =
      relation_messages(tape, ParamSource(params), bg, tape.constant(x), layer, relation, Branch::Correlation);
  return node_row(msg, node, config_.hidden_dims.at(layer));
}

ad::Tensor MoherModel::differences(const ad::ParamStore& params, std::size_t layer,
                                   const LocalizedGraph& graph, const ad::Tensor& x, std::size_t node,
                                   std::size_t relation) const {
  check_rows(x, graph);
  if (node == 0 || node >= graph.nodes.size()) throw InvalidInput("node must be a non-target node index");
  const BatchGraph bg = structure_only(graph, config_);
  ad::Tape tape;
  const ad::Var msg =
      relation_messages(tape, ParamSource(params), bg, tape.constant(x), layer, relation, Branch::Difference);
  return node_row(msg, node, config_.hidden_dims.at(layer));
}

ad::Tensor MoherModel::layer_forward(const ad::ParamStore& params, std::size_t layer,
                                     const LocalizedGraph& graph, const ad::Tensor& x) const {
  check_rows(x, graph);
  const BatchGraph bg = structure_only(graph, config_);
  ad::Tape tape;
  return layer_forward(tape, ParamSource(params), bg, tape.constant(x), layer).value();
}

ad::Tensor MoherModel::node_embeddings(const ad::ParamStore& params, const LocalizedGraph& graph,
                                       const ad::Tensor& x) const {
  check_rows(x, graph);
  const BatchGraph bg = compile_graph(graph, x, config_);
  ad::Tape tape;
  return embed(tape, ParamSource(params), bg).value();
}

TargetRepresentation MoherModel::aggregate_target(const LocalizedGraph& graph,
                                                  const ad::Tensor& embeddings) const {
  if (embeddings.rank() != 2 || embeddings.rows() + 1 != graph.nodes.size() ||
      embeddings.cols() != config_.embedding_dim()) {
    throw ShapeError("embeddings " + embeddings.shape_string() + " do not match the graph");
  }
  const BatchGraph bg = structure_only(graph, config_);
  ad::Tape tape;
  TargetRepresentation out;
  out.h = aggregate(tape, bg, tape.constant(embeddings)).value();
  out.isolated = bg.isolated.front();
  return out;
}

std::vector<double> MoherModel::predict(const ad::ParamStore& params, const WindowSample& sample) const {
  const WindowSample* one[] = {&sample};
  const BatchGraph bg = compile_batch(one, config_);
  ad::Tape tape;
  const ad::Tensor& y = forward(tape, ParamSource(params), bg).value();
  return {y.values().begin(), y.values().end()};
}

}  // namespace moher

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "moher/autodiff.hpp"
#include "moher/graph.hpp"
#include "moher/sampler.hpp"

namespace moher {

class Rng;

enum class Branch { Correlation, Difference };

struct ModelConfig {
  std::size_t mode_count = 3;
  std::size_t input_dim = 2;                    // channels per slot (inflow, outflow)
  std::vector<std::size_t> hidden_dims{16, 16};  // one entry per relational layer
  std::size_t basis_count = 4;
  std::size_t lstm_hidden = 32;
  std::size_t window = 6;
  bool use_cross_mode = true;
  bool use_poi = true;
  bool use_differences = true;
  bool use_basis_regularization = true;

  std::size_t layers() const { return hidden_dims.size(); }
  std::size_t layer_input(std::size_t l) const { return l == 0 ? input_dim : hidden_dims[l - 1]; }
  /// Per-node embedding width: the layer outputs side by side.
  std::size_t embedding_dim() const;
  std::size_t relation_count() const { return mode_count * (mode_count + 1); }
  /// Width of the fixed-size target representation fed to the LSTM.
  std::size_t target_dim() const { return relation_count() * embedding_dim(); }
  void validate() const;
};

/// Where a forward pass reads its parameters from: trainable (gradients flow
/// into the store) or frozen (read-only snapshot).
class ParamSource {
 public:
  ParamSource(ad::ParamStore& store) : mutable_(&store), store_(&store) {}  // NOLINT
  ParamSource(const ad::ParamStore& store) : store_(&store) {}              // NOLINT

  ad::Var get(ad::Tape& tape, const std::string& name) const;
  const ad::ParamStore& store() const { return *store_; }

 private:
  ad::ParamStore* mutable_ = nullptr;
  const ad::ParamStore* store_ = nullptr;
};

/// One prediction problem: t' localized graphs plus node features per slot.
/// features[s] has one row per non-target node of window->slots[s], in node
/// order (row k - 1 holds node k).
struct WindowSample {
  std::shared_ptr<const GraphWindow> window;
  std::vector<ad::Tensor> features;
  std::vector<double> label;  // normalized next-slot flow; empty when unknown
};

/// A minibatch of windows flattened into one block-diagonal graph. Instances
/// are ordered slot-major: instance s * batch + b is slot s of sample b.
struct BatchGraph {
  struct Messages {
    std::vector<std::int64_t> src;
    std::vector<std::int64_t> dst;
    std::vector<double> weight;  // epsilon / |N_r(dst)|
  };

  std::size_t batch = 0;
  std::size_t window = 0;
  std::size_t node_rows = 0;
  ad::Tensor features;                 // node_rows x input_dim
  std::vector<Messages> messages;      // indexed by relation
  std::vector<std::int64_t> target_src;  // (instance, relation) -> node row or -1
  std::vector<double> target_weight;
  std::vector<bool> isolated;  // per instance: target had no usable edge

  std::size_t instances() const { return batch * window; }
};

BatchGraph compile_batch(std::span<const WindowSample* const> samples, const ModelConfig& config);
/// Single graph with features for its non-target nodes.
BatchGraph compile_graph(const LocalizedGraph& graph, const ad::Tensor& features,
                         const ModelConfig& config);

/// Target pooled per relation type: the highest-weight neighbor of each.
struct TargetRepresentation {
  ad::Tensor h;  // 1 x target_dim
  bool isolated = false;
};

// Single-layer LSTM with an affine head, parameters "<prefix>.w_x",
// "<prefix>.w_h", "<prefix>.b" (gate order i, f, g, o) and "<prefix>.head_w",
// "<prefix>.head_b".
void init_lstm(ad::ParamStore& store, const std::string& prefix, std::size_t input,
               std::size_t hidden, std::size_t output, Rng& rng);
/// Runs the sequence (each step batch x input) from a zero state and returns
/// the head output for the final hidden state.
ad::Var lstm_forward(ad::Tape& tape, const ParamSource& params, const std::string& prefix,
                     std::span<const ad::Var> steps);
ad::Tensor lstm_forward(const ad::ParamStore& params, const std::string& prefix,
                        std::span<const ad::Tensor> steps);

class MoherModel {
 public:
  explicit MoherModel(ModelConfig config);

  const ModelConfig& config() const { return config_; }
  const std::vector<RelationType>& relations() const { return relations_; }

  void init_params(ad::ParamStore& store, std::uint64_t seed) const;
  /// Relational-layer parameter count per layer under the current config.
  std::size_t layer_param_count(std::size_t layer) const;

  /// Per-relation weight (d_in x d_out) and bias (1 x d_out).
  std::pair<ad::Var, ad::Var> reconstruct_weights(ad::Tape& tape, const ParamSource& params,
                                                  std::size_t layer, std::size_t relation,
                                                  Branch branch) const;
  std::pair<ad::Tensor, ad::Tensor> reconstruct_weights(const ad::ParamStore& params,
                                                        std::size_t layer, std::size_t relation,
                                                        Branch branch) const;

  /// Message sums of one branch and relation for every node row.
  ad::Var relation_messages(ad::Tape& tape, const ParamSource& params, const BatchGraph& graph,
                            const ad::Var& x, std::size_t layer, std::size_t relation,
                            Branch branch) const;
  ad::Var layer_forward(ad::Tape& tape, const ParamSource& params, const BatchGraph& graph,
                        const ad::Var& x, std::size_t layer) const;
  /// Node embeddings (node_rows x embedding_dim).
  ad::Var embed(ad::Tape& tape, const ParamSource& params, const BatchGraph& graph) const;
  /// Target representations (instances x target_dim).
  ad::Var aggregate(ad::Tape& tape, const BatchGraph& graph, const ad::Var& embeddings) const;
  /// Normalized predictions (batch x input_dim).
  ad::Var forward(ad::Tape& tape, const ParamSource& params, const BatchGraph& graph) const;

  // Tensor conveniences on a single graph. X holds non-target node rows and
  // `node` is a graph node index (>= 1).
  ad::Tensor correlations(const ad::ParamStore& params, std::size_t layer, const LocalizedGraph& graph,
                          const ad::Tensor& x, std::size_t node, std::size_t relation) const;
  ad::Tensor differences(const ad::ParamStore& params, std::size_t layer, const LocalizedGraph& graph,
                         const ad::Tensor& x, std::size_t node, std::size_t relation) const;
  ad::Tensor layer_forward(const ad::ParamStore& params, std::size_t layer,
                           const LocalizedGraph& graph, const ad::Tensor& x) const;
  ad::Tensor node_embeddings(const ad::ParamStore& params, const LocalizedGraph& graph,
                             const ad::Tensor& x) const;
  TargetRepresentation aggregate_target(const LocalizedGraph& graph, const ad::Tensor& embeddings) const;
  std::vector<double> predict(const ad::ParamStore& params, const WindowSample& sample) const;

 private:
  std::string layer_name(std::size_t layer, const char* what) const;

  ModelConfig config_;
  std::vector<RelationType> relations_;
};

}  // namespace moher

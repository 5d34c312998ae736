// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include "moher/autodiff.hpp"
#include "moher/kernels.hpp"

namespace moher::ad {

const Tensor& Var::value() const {
  if (tape_ == nullptr) throw InvalidInput("use of an unbound Var");
  return tape_->value(*this);
}

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

void Tape::check_owner(const Var& v) const {
  if (v.tape() != this || v.id() >= nodes_.size()) {
    throw InvalidInput("Var does not belong to this tape");
  }
}

Var Tape::constant(Tensor value) {
  Node n;
  n.owned = std::move(value);
  return push(std::move(n));
}

Var Tape::param(ParamStore& store, const std::string& name) {
  Param& p = store.at(name);
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return Var(this, it->second);
  if (p.grad.shape() != p.value.shape()) p.grad = Tensor(p.value.shape(), std::vector<double>(p.value.size()));
  Node n;
  n.ref = &p.value;
  n.param = &p;
  n.requires_grad = true;
  Var v = push(std::move(n));
  param_nodes_.emplace(&p, static_cast<std::uint32_t>(v.id()));
  return v;
}

Var Tape::param(const ParamStore& store, const std::string& name) {
  const Param& p = store.at(name);
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return Var(this, it->second);
  Node n;
  n.ref = &p.value;
  Var v = push(std::move(n));
  param_nodes_.emplace(&p, static_cast<std::uint32_t>(v.id()));
  return v;
}

Var Tape::record(Tensor value, std::initializer_list<Var> inputs, Backward backward) {
  return record(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
                std::move(backward));
}

Var Tape::record(Tensor value, std::span<const Var> inputs, Backward backward) {
  Node n;
  n.owned = std::move(value);
  for (const Var& in : inputs) {
    check_owner(in);
    if (nodes_[in.id()].requires_grad) n.requires_grad = true;
  }
  if (n.requires_grad) n.backward = std::move(backward);
  return push(std::move(n));
}

const Tensor& Tape::value(const Var& v) const {
  check_owner(v);
  return nodes_[v.id()].value();
}

bool Tape::requires_grad(const Var& v) const {
  check_owner(v);
  return nodes_[v.id()].requires_grad;
}

Tensor& Tape::grad(const Var& v) {
  check_owner(v);
  Node& n = nodes_[v.id()];
  if (n.grad.shape() != n.value().shape()) {
    n.grad = Tensor(n.value().shape(), std::vector<double>(n.value().size(), 0.0));
  }
  return n.grad;
}

const Tensor& Tape::grad_of(const Var& v) const {
  check_owner(v);
  return nodes_[v.id()].grad;
}

void Tape::backward(const Var& loss) {
  check_owner(loss);
  const Tensor& lv = value(loss);
  if (lv.size() != 1) {
    throw InvalidInput("backward: loss must be scalar, got shape " + lv.shape_string());
  }
  grad(loss)[0] += 1.0;
  const auto& kern = kernels::active();
  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!n.requires_grad || n.grad.shape() != n.value().shape()) continue;
    if (n.param != nullptr) {
      kern.axpy(n.grad.size(), 1.0, n.grad.data(), n.param->grad.data());
    } else if (n.backward) {
      n.backward(*this, n.value(), n.grad);
    }
  }
}

void Tape::note_kinks(const Tensor& input) {
  if (!track_kinks_) return;
  std::uint64_t h = kink_signature_;
  for (double x : input.values()) {
    const std::uint64_t sign = x > 0.0 ? 1 : (x < 0.0 ? 2 : 3);
    h = (h ^ sign) * 0x100000001b3ULL;
  }
  kink_signature_ = h;
}

}  // namespace moher::ad

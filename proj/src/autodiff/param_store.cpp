// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include <cmath>

#include "moher/autodiff.hpp"
#include "moher/kernels.hpp"

namespace moher::ad {

Param& ParamStore::add(const std::string& name, Tensor init) {
  if (params_.contains(name)) throw InvalidInput("duplicate parameter '" + name + "'");
  Param p;
  p.grad = Tensor(init.shape(), std::vector<double>(init.size(), 0.0));
  p.m = p.grad;
  p.v = p.grad;
  p.value = std::move(init);
  return params_.emplace(name, std::move(p)).first->second;
}

Param& ParamStore::at(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw InvalidInput("unknown parameter '" + name + "'");
  return it->second;
}

const Param& ParamStore::at(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw InvalidInput("unknown parameter '" + name + "'");
  return it->second;
}

void ParamStore::zero_grad() {
  for (auto& [name, p] : params_) {
    if (p.grad.shape() != p.value.shape()) {
      p.grad = Tensor(p.value.shape(), std::vector<double>(p.value.size(), 0.0));
    } else {
      p.grad.fill(0.0);
    }
  }
}

std::size_t ParamStore::scalar_count() const { return scalar_count(""); }

std::size_t ParamStore::scalar_count(std::string_view prefix) const {
  std::size_t n = 0;
  for (const auto& [name, p] : params_) {
    if (std::string_view(name).starts_with(prefix)) n += p.value.size();
  }
  return n;
}

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  out.reserve(params_.size());
  for (const auto& [name, p] : params_) out.push_back(name);
  return out;
}

void adam_step(ParamStore& store, const AdamOptions& options) {
  const auto& kern = kernels::active();
  for (auto& [name, p] : store) {
    if (p.grad.shape() != p.value.shape()) continue;
    if (p.m.shape() != p.value.shape()) p.m = Tensor(p.value.shape(), std::vector<double>(p.value.size()));
    if (p.v.shape() != p.value.shape()) p.v = Tensor(p.value.shape(), std::vector<double>(p.value.size()));
    ++p.step;
    kernels::AdamCoefficients c;
    c.lr = options.lr;
    c.beta1 = options.beta1;
    c.beta2 = options.beta2;
    c.eps = options.eps;
    c.bias1 = 1.0 - std::pow(options.beta1, static_cast<double>(p.step));
    c.bias2 = 1.0 - std::pow(options.beta2, static_cast<double>(p.step));
    kern.adam(p.value.size(), p.value.data(), p.grad.data(), p.m.data(), p.v.data(), c);
  }
}

}  // namespace moher::ad

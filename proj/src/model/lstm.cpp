// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include <cmath>

#include "moher/model.hpp"
#include "moher/rng.hpp"

namespace moher {

ad::Var ParamSource::get(ad::Tape& tape, const std::string& name) const {
  return mutable_ != nullptr ? tape.param(*mutable_, name) : tape.param(*store_, name);
}

void init_lstm(ad::ParamStore& store, const std::string& prefix, std::size_t input,
               std::size_t hidden, std::size_t output, Rng& rng) {
  const double k = 1.0 / std::sqrt(static_cast<double>(hidden));
  auto uniform = [&](std::size_t rows, std::size_t cols, double limit) {
    ad::Tensor t(rows, cols);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-limit, limit);
    return t;
  };
  store.add(prefix + ".w_x", uniform(input, 4 * hidden, k));
  store.add(prefix + ".w_h", uniform(hidden, 4 * hidden, k));
  ad::Tensor bias(1, 4 * hidden);
  for (std::size_t j = hidden; j < 2 * hidden; ++j) bias[j] = 1.0;  // forget gate
  store.add(prefix + ".b", std::move(bias));
  store.add(prefix + ".head_w",
            uniform(hidden, output, std::sqrt(6.0 / static_cast<double>(hidden + output))));
  store.add(prefix + ".head_b", ad::Tensor(1, output));
}

ad::Var lstm_forward(ad::Tape& tape, const ParamSource& params, const std::string& prefix,
                     std::span<const ad::Var> steps) {
  if (steps.empty()) throw InvalidInput("lstm_forward: empty sequence");
  const ad::Var wx = params.get(tape, prefix + ".w_x");
  const ad::Var wh = params.get(tape, prefix + ".w_h");
  const ad::Var b = params.get(tape, prefix + ".b");
  const std::size_t hidden = wh.rows();
  if (wx.cols() != 4 * hidden || wh.cols() != 4 * hidden) {
    throw ShapeError("lstm_forward: gate weights " + wx.value().shape_string() + " and " +
                     wh.value().shape_string() + " disagree");
  }

  ad::Var h, c;
  for (const ad::Var& x : steps) {
    ad::Var z = ad::add(ad::matmul(x, wx), b);
    if (h.valid()) z = ad::add(z, ad::matmul(h, wh));
    const ad::Var i = ad::sigmoid(ad::slice_cols(z, 0, hidden));
    const ad::Var f = ad::sigmoid(ad::slice_cols(z, hidden, hidden));
    const ad::Var g = ad::tanh(ad::slice_cols(z, 2 * hidden, hidden));
    const ad::Var o = ad::sigmoid(ad::slice_cols(z, 3 * hidden, hidden));
    c = c.valid() ? ad::add(ad::mul(f, c), ad::mul(i, g)) : ad::mul(i, g);
    h = ad::mul(o, ad::tanh(c));
  }
  return ad::add(ad::matmul(h, params.get(tape, prefix + ".head_w")),
                 params.get(tape, prefix + ".head_b"));
}

ad::Tensor lstm_forward(const ad::ParamStore& params, const std::string& prefix,
                        std::span<const ad::Tensor> steps) {
  ad::Tape tape;
  std::vector<ad::Var> vars;
  vars.reserve(steps.size());
  for (const ad::Tensor& s : steps) vars.push_back(tape.constant(s));
  return lstm_forward(tape, ParamSource(params), prefix, vars).value();
}

}  // namespace moher

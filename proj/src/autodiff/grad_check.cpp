// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include <algorithm>
#include <cmath>
#include <sstream>

#include "moher/autodiff.hpp"

namespace moher::ad {

namespace {

struct Probe {
  double value;
  std::uint64_t signature;
};

void compare(GradCheckReport& report, const GradCheckOptions& options, const std::string& name,
             std::size_t index, double analytic, double numeric) {
  ++report.checked;
  if (!std::isfinite(analytic) || !std::isfinite(numeric)) {
    report.non_finite = true;
    if (report.diagnostics.empty()) {
      std::ostringstream os;
      os << "non-finite gradient at " << name << "[" << index << "]: analytic=" << analytic
         << " numeric=" << numeric;
      report.diagnostics = os.str();
    }
    return;
  }
  const double denom = std::max({std::fabs(analytic), std::fabs(numeric), options.magnitude_floor});
  const double rel = std::fabs(analytic - numeric) / denom;
  if (rel > report.max_rel_error || report.worst_param.empty()) {
    report.max_rel_error = rel;
    report.worst_param = name;
    report.worst_index = index;
    report.worst_analytic = analytic;
    report.worst_numeric = numeric;
  }
}

void finish(GradCheckReport& report, const GradCheckOptions& options) {
  report.passed = !report.non_finite && report.max_rel_error <= options.tolerance;
  if (report.diagnostics.empty() && !report.passed) {
    std::ostringstream os;
    os << "max relative error " << report.max_rel_error << " at " << report.worst_param << "["
       << report.worst_index << "]: analytic=" << report.worst_analytic
       << " numeric=" << report.worst_numeric;
    report.diagnostics = os.str();
  }
}

}  // namespace

GradCheckReport grad_check(const ScalarFn& f, const Tensor& x, const GradCheckOptions& options) {
  GradCheckReport report;
  Tensor analytic;
  {
    Tape tape;
    ParamStore holder;
    holder.add("x", x);
    Var xv = tape.param(holder, "x");
    Var loss = f(tape, xv);
    tape.backward(loss);
    analytic = holder.at("x").grad;
  }
  auto eval = [&](const Tensor& at) {
    Tape tape;
    tape.set_track_kinks(true);
    Var loss = f(tape, tape.constant(at));
    return Probe{loss.value()[0], tape.kink_signature()};
  };
  Tensor probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + options.step;
    const Probe plus = eval(probe);
    probe[i] = saved - options.step;
    const Probe minus = eval(probe);
    probe[i] = saved;
    if (plus.signature != minus.signature) {
      report.kinks.push_back({"x", i});
      continue;
    }
    compare(report, options, "x", i, analytic[i], (plus.value - minus.value) / (2.0 * options.step));
  }
  finish(report, options);
  return report;
}

GradCheckReport grad_check(ParamStore& store, const LossFn& f, const GradCheckOptions& options) {
  GradCheckReport report;
  store.zero_grad();
  {
    Tape tape;
    Var loss = f(tape, store);
    tape.backward(loss);
  }
  std::map<std::string, Tensor> analytic;
  for (auto& [name, p] : store) analytic.emplace(name, p.grad);

  auto eval = [&]() {
    Tape tape;
    tape.set_track_kinks(true);
    Var loss = f(tape, store);
    return Probe{loss.value()[0], tape.kink_signature()};
  };
  for (auto& [name, p] : store) {
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double saved = p.value[i];
      p.value[i] = saved + options.step;
      const Probe plus = eval();
      p.value[i] = saved - options.step;
      const Probe minus = eval();
      p.value[i] = saved;
      if (plus.signature != minus.signature) {
        report.kinks.push_back({name, i});
        continue;
      }
      compare(report, options, name, i, analytic.at(name)[i],
              (plus.value - minus.value) / (2.0 * options.step));
    }
  }
  finish(report, options);
  return report;
}

}  // namespace moher::ad

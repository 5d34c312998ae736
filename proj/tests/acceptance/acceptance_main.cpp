// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "moher/baselines.hpp"
#include "moher/io.hpp"
#include "moher/rng.hpp"
#include "moher/synthcity.hpp"
#include "moher/toy.hpp"
#include "moher/training.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace moher::acceptance {
namespace {

using Clock = std::chrono::steady_clock;
using testing::Matrix;
using testing::Oracle;
using testing::to_matrix;

// Pinned tolerances and budgets.
constexpr double kGradTolerance = 1e-4;
constexpr double kGradStep = 1e-5;
constexpr double kForwardTolerance = 1e-12;
constexpr double kBasisTolerance = 1e-10;
constexpr double kRoundTripTolerance = 1e-12;
constexpr double kBaselineMargin = 0.10;  // MOHER at least 10% below NA-HA
constexpr double kInductiveFactor = 2.0;
constexpr std::size_t kBenchmarkRepeats = 5;
constexpr double kGradBudgetS = 120.0;
constexpr double kForwardBudgetS = 60.0;
constexpr double kSamplerBudgetS = 30.0;
constexpr double kBenchmarkBudgetS = 600.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double max_diff(const Matrix& a, const ad::Tensor& b) {
  if (a.size() != b.rows()) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) worst = std::max(worst, std::abs(a[i][j] - b(i, j)));
  return worst;
}

double max_diff(const std::vector<double>& a, std::span<const double> b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

ad::ParamStore perturbed_params(const MoherModel& model, std::uint64_t seed) {
  ad::ParamStore p;
  model.init_params(p, seed);
  Rng rng(mix64(seed));
  for (auto& [name, param] : p)
    for (double& v : param.value.values()) v += 0.3 * rng.normal();
  return p;
}

ModelConfig toy_config() {
  ModelConfig c;
  c.mode_count = 2;
  c.input_dim = 2;
  c.hidden_dims = {3, 3};
  c.basis_count = 2;
  c.lstm_hidden = 3;
  c.window = 3;
  return c;
}

// Random model shape for the forward oracles.
ModelConfig random_config(std::mt19937_64& rng) {
  ModelConfig c;
  c.mode_count = 1 + rng() % 3;
  c.input_dim = 2;
  c.hidden_dims = {2 + rng() % 4, 2 + rng() % 4};
  c.basis_count = 1 + rng() % 4;
  c.lstm_hidden = 4;
  c.window = 1 + rng() % 3;
  c.use_basis_regularization = rng() % 4 != 0;
  return c;
}

// ---- 1 --------------------------------------------------------------------

Outcome gradient_integrity() {
  struct Setting {
    const char* name;
    void (*apply)(ModelConfig&);
  };
  const Setting settings[] = {
      {"full", [](ModelConfig&) {}},
      {"no_cross_mode", [](ModelConfig& c) { c.use_cross_mode = false; }},
      {"no_poi", [](ModelConfig& c) { c.use_poi = false; }},
      {"no_differences", [](ModelConfig& c) { c.use_differences = false; }},
  };
  ad::GradCheckOptions opt;
  opt.step = kGradStep;
  opt.tolerance = kGradTolerance;
  double worst = 0.0;
  std::size_t checked = 0, kinks = 0, failures = 0;
  for (const Setting& s : settings) {
    ModelConfig cfg = toy_config();
    s.apply(cfg);
    for (std::uint64_t i = 0; i < 20; ++i) {
      const ToyInstance toy = make_toy_instance(1000003 + i, cfg, 8);
      const ad::GradCheckReport r = check_model_gradients(cfg, toy, 1000003 + i + 17, opt);
      worst = std::max(worst, r.max_rel_error);
      checked += r.checked;
      kinks += r.kinks.size();
      if (!r.passed) {
        ++failures;
        std::fprintf(stderr, "gradcheck %s instance %llu: %s\n", s.name, static_cast<unsigned long long>(i),
                     r.diagnostics.c_str());
      }
    }
  }
  return {failures == 0 && worst < kGradTolerance,
          "80 instances, " + std::to_string(checked) + " coordinates, " + std::to_string(kinks) +
              " at kinks excluded, max rel error " + fmt("%.2e", worst) + " (tol 1e-4)"};
}

// ---- 2 --------------------------------------------------------------------

Outcome forward_oracles() {
  std::mt19937_64 rng(20260);
  double worst[5] = {0, 0, 0, 0, 0};  // correlations, differences, layer, weights, pooling
  std::size_t count[5] = {0, 0, 0, 0, 0};
  for (std::uint64_t inst = 0; inst < 100; ++inst) {
    const ModelConfig cfg = random_config(rng);
    const MoherModel model(cfg);
    const ad::ParamStore p = perturbed_params(model, inst + 1);
    const Oracle o{cfg, p};
    const ToyInstance toy = make_toy_instance(inst + 500, cfg, 2 + rng() % 9);
    const std::size_t s = rng() % cfg.window;
    const LocalizedGraph& g = toy.sample.window->slots[s];
    const ad::Tensor& x = toy.sample.features[s];
    const std::size_t layer = rng() % cfg.layers();
    // Inputs of the chosen layer come from the oracle itself.
    Matrix xl = to_matrix(x);
    for (std::size_t l = 0; l < layer && !xl.empty(); ++l) xl = o.layer(g, xl, l);
    ad::Tensor xt(xl.size(), cfg.layer_input(layer));
    for (std::size_t i = 0; i < xl.size(); ++i)
      for (std::size_t c = 0; c < xl[i].size(); ++c) xt(i, c) = xl[i][c];

    for (std::size_t r = 0; r < cfg.relation_count(); ++r) {
      for (const char* tag : {"corr", "diff"}) {
        const auto [w, b] = model.reconstruct_weights(p, layer, r, tag[0] == 'c' ? Branch::Correlation : Branch::Difference);
        const auto [ow, ob] = o.weights(layer, r, tag);
        worst[3] = std::max({worst[3], max_diff(ow, w), max_diff(ob, b.values())});
      }
    }
    ++count[3];
    if (g.nodes.size() < 2) continue;
    for (std::size_t i = 1; i < g.nodes.size(); ++i) {
      for (std::size_t r = 0; r < cfg.relation_count(); ++r) {
        worst[0] = std::max(worst[0], max_diff(o.message(g, xl, layer, i, r, false),
                                               model.correlations(p, layer, g, xt, i, r).values()));
        worst[1] = std::max(worst[1], max_diff(o.message(g, xl, layer, i, r, true),
                                               model.differences(p, layer, g, xt, i, r).values()));
      }
    }
    ++count[0];
    ++count[1];
    worst[2] = std::max(worst[2], max_diff(o.layer(g, xl, layer), model.layer_forward(p, layer, g, xt)));
    ++count[2];
    const Matrix emb = o.embeddings(g, to_matrix(x));
    const ad::Tensor got = model.node_embeddings(p, g, x);
    worst[4] = std::max({worst[4], max_diff(emb, got), max_diff(o.target(g, emb), model.aggregate_target(g, got).h.values())});
    ++count[4];
  }
  const double all = *std::max_element(std::begin(worst), std::end(worst));
  const std::size_t fewest = *std::min_element(std::begin(count), std::end(count));
  std::ostringstream os;
  os << "max abs error corr " << fmt("%.1e", worst[0]) << ", diff " << fmt("%.1e", worst[1]) << ", layer "
     << fmt("%.1e", worst[2]) << ", weights " << fmt("%.1e", worst[3]) << ", pooling " << fmt("%.1e", worst[4])
     << " over >= " << fewest << " instances each (tol 1e-12)";
  return {all < kForwardTolerance && fewest >= 90, os.str()};
}

// ---- 3 --------------------------------------------------------------------

Outcome sampler_equivalence() {
  std::mt19937_64 rng(7331);
  std::size_t matches = 0, nodes = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t n = 2 + rng() % 29;
    const std::size_t modes = 1 + rng() % 3;
    auto sites = testing::random_sites(rng, n, modes, 1.0 + static_cast<double>(rng() % 4));
    const Site target = sites.front();
    const std::vector<Site> recorded(sites.begin() + 1, sites.end());
    std::vector<const Site*> ptrs;
    for (const Site& s : recorded) ptrs.push_back(&s);
    const std::size_t budget = rng() % 12;
    const EdgeParams params{0.6 + 0.1 * static_cast<double>(rng() % 8), 0.3 + 0.1 * static_cast<double>(rng() % 5),
                            rng() % 5 != 0};
    const LocalizedGraph fast = build_localized_graph(target, ptrs, budget, params);
    matches += testing::same_graph(fast, testing::naive_localized_graph(target, recorded, budget, params));
    nodes += fast.nodes.size();
  }
  return {matches == 50, std::to_string(matches) + "/50 graphs identical in nodes, order and edges (" +
                             std::to_string(nodes) + " nodes total)"};
}

// ---- 4 --------------------------------------------------------------------

Outcome basis_equivalence() {
  double worst = 0.0;
  for (std::uint64_t inst = 0; inst < 20; ++inst) {
    ModelConfig basis = toy_config();
    basis.mode_count = 1 + inst % 3;
    basis.hidden_dims = {4, 3};
    basis.basis_count = basis.relation_count();
    ModelConfig free = basis;
    free.use_basis_regularization = false;
    const MoherModel mb(basis), mf(free);
    ad::ParamStore pb = perturbed_params(mb, inst + 10);
    ad::ParamStore pf;
    mf.init_params(pf, inst + 10);
    const std::size_t R = basis.relation_count();
    for (std::size_t l = 0; l < basis.layers(); ++l) {
      const std::string g = "gcn" + std::to_string(l) + ".";
      for (const char* tag : {"corr", "diff"}) {
        ad::Tensor eye(R, R);
        for (std::size_t r = 0; r < R; ++r) eye(r, r) = 1.0;
        pb.at(g + "coef_w_" + tag).value = eye;
        pb.at(g + "coef_b_" + tag).value = eye;
        pf.at(g + "w_" + tag).value = pb.at(g + "basis_w").value;
        pf.at(g + "b_" + tag).value = pb.at(g + "basis_b").value;
      }
      pf.at(g + "self_w").value = pb.at(g + "self_w").value;
    }
    for (const char* n : {"lstm.w_x", "lstm.w_h", "lstm.b", "lstm.head_w", "lstm.head_b"}) pf.at(n).value = pb.at(n).value;
    const ToyInstance toy = make_toy_instance(inst + 77, basis, 8);
    worst = std::max(worst, max_diff(mb.predict(pb, toy.sample), mf.predict(pf, toy.sample)));
  }
  return {worst < kBasisTolerance, "20 instances, max abs difference " + fmt("%.1e", worst) + " (tol 1e-10)"};
}

// ---- 5 and 6 --------------------------------------------------------------

struct Benchmark {
  io::RunConfig config;
  SynthCity city;
  SplitPlan split;
  std::vector<double> full, no_differences, no_cross_mode;
  double na_ha = 0.0;
  TrainResult best_full;
  double best_full_test = 0.0;
  double seconds = 0.0;
};

double test_rmse(const Benchmark& b, const TrainResult& r, const TrainConfig& tc) {
  const Evaluation ev = evaluate(MoherModel(r.model), r.params, r.normalizer, b.city.data, b.split.train,
                                 b.split.test, b.split.eval_slots, sampler_settings(tc, r.neighbor_budget));
  return ev.metrics.rmse;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

std::string list(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + fmt("%.2f", x);
  return s;
}

Benchmark run_benchmark() {
  const auto t0 = Clock::now();
  Benchmark b;
  io::apply_seed(b.config);  // defaults: 3 modes, 120 sites, 600 slots, kappa 0.5
  b.city = generate(b.config.synth);
  b.split = make_split(b.city.data, b.config.seed);
  double best_val = INFINITY;
  for (std::size_t r = 0; r < kBenchmarkRepeats; ++r) {
    TrainConfig tc = b.config.train;
    tc.seed = b.config.train.seed + r;
    const TrainResult full = train(b.city.data, b.split, tc);
    b.full.push_back(test_rmse(b, full, tc));
    if (full.best_val_rmse < best_val) {
      best_val = full.best_val_rmse;
      b.best_full = full;
      b.best_full_test = b.full.back();
    }
    TrainConfig nd = tc;
    nd.model.use_differences = false;
    b.no_differences.push_back(test_rmse(b, train(b.city.data, b.split, nd), nd));
    TrainConfig nc = tc;
    nc.model.use_cross_mode = false;
    b.no_cross_mode.push_back(test_rmse(b, train(b.city.data, b.split, nc), nc));
    std::fprintf(stderr, "benchmark repeat %zu: full %.3f no_differences %.3f no_cross_mode %.3f\n", r,
                 b.full.back(), b.no_differences.back(), b.no_cross_mode.back());
  }
  const NeighborAverage na(b.city.data, b.split.train, b.config.train.edges.gamma_km);
  b.na_ha = evaluate_na_ha(na, b.split.test, b.split.eval_slots).metrics.rmse;
  b.seconds = seconds_since(t0);
  return b;
}

Outcome synthetic_benchmark(const Benchmark& b) {
  const double full = mean(b.full), nd = mean(b.no_differences), nc = mean(b.no_cross_mode);
  const bool margin = full <= (1.0 - kBaselineMargin) * b.na_ha;
  const bool order_d = full < nd;
  const bool order_c = full < nc;
  const bool fast = b.seconds < kBenchmarkBudgetS;
  std::ostringstream os;
  os << "test RMSE mean of " << kBenchmarkRepeats << " runs: full " << fmt("%.2f", full) << " [" << list(b.full)
     << "], NA-HA " << fmt("%.2f", b.na_ha) << " (" << (margin ? "ok" : "FAIL") << " need <= "
     << fmt("%.2f", (1.0 - kBaselineMargin) * b.na_ha) << "), no_differences " << fmt("%.2f", nd) << " ["
     << list(b.no_differences) << "] (" << (order_d ? "ok" : "FAIL") << "), no_cross_mode " << fmt("%.2f", nc)
     << " [" << list(b.no_cross_mode) << "] (" << (order_c ? "ok" : "FAIL") << "), " << fmt("%.0f", b.seconds)
     << "s of 600s";
  return {margin && order_d && order_c && fast, os.str()};
}

std::uint64_t param_hash(const ad::ParamStore& p) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (const auto& [name, param] : p) {
    for (double v : param.value.values()) h = mix64(h ^ std::bit_cast<std::uint64_t>(v));
  }
  return h;
}

Outcome inductive_contract(const Benchmark& b) {
  const TrainResult& r = b.best_full;
  const std::uint64_t before = param_hash(r.params);
  const MoherModel model(r.model);
  std::vector<SiteUid> everyone;
  for (const Site& s : b.city.data.sites) everyone.push_back(s.uid);
  SampleFactory factory(b.city.data, everyone, r.normalizer, sampler_settings(b.config.train, r.neighbor_budget));

  Rng rng(4242);
  std::vector<double> pred, truth;
  std::size_t isolated = 0;
  constexpr std::size_t kNewSites = 12;
  for (std::size_t k = 0; k < kNewSites; ++k) {
    const ModeId mode = static_cast<ModeId>(k % b.config.synth.modes.size());
    const double extent = b.config.synth.plane_km;
    const Point at{rng.uniform(0.1 * extent, 0.9 * extent), rng.uniform(0.1 * extent, 0.9 * extent)};
    const Site site = make_hypothetical_site(b.config.synth, mode, at, -1 - static_cast<SiteUid>(k));
    for (std::size_t label = b.split.eval_slots.begin; label < b.split.eval_slots.end; ++label) {
      const auto sample = factory.make(site, label - 1, SampleMode::Inference, false);
      if (!sample) throw NumericError("inference sample unexpectedly missing");
      std::vector<double> y = model.predict(r.params, *sample);
      r.normalizer.invert(y);
      const std::vector<double> g = ground_truth_flow(b.config.synth, site, label);
      pred.insert(pred.end(), y.begin(), y.end());
      truth.insert(truth.end(), g.begin(), g.end());
      if (sample->window->slots.back().edges.empty()) ++isolated;
    }
  }
  const double rmse = score(pred, truth).rmse;
  const bool unchanged = param_hash(r.params) == before;
  const double bound = kInductiveFactor * b.best_full_test;
  std::ostringstream os;
  os << kNewSites << " unseen sites x " << (b.split.eval_slots.end - b.split.eval_slots.begin)
     << " slots: RMSE vs ground truth " << fmt("%.2f", rmse) << " (bound 2 x " << fmt("%.2f", b.best_full_test)
     << " = " << fmt("%.2f", bound) << "), parameters " << (unchanged ? "unchanged" : "CHANGED") << ", "
     << isolated << " isolated windows";
  return {unchanged && rmse <= bound && std::isfinite(rmse), os.str()};
}

// ---- CLI helpers ----------------------------------------------------------

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun cli(const std::string& args) {
  const std::string cmd = std::string(MOHER_CLI_PATH) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe) != nullptr) r.out += buf.data();
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

// ---- 7 --------------------------------------------------------------------

Outcome determinism(const std::filesystem::path& city) {
  const std::filesystem::path root = city.parent_path();
  const CliRun a = cli("--deterministic --seed 5 train --data " + city.string() + " --out " + (root / "det_a").string());
  const CliRun b = cli("--deterministic --seed 5 train --data " + city.string() + " --out " + (root / "det_b").string());
  if (a.code != 0 || b.code != 0) return {false, "train exited with " + std::to_string(a.code) + "/" + std::to_string(b.code)};
  const bool ckpt = io::read_file(root / "det_a" / "model.ckpt") == io::read_file(root / "det_b" / "model.ckpt");
  const bool metrics = io::read_file(root / "det_a" / "metrics.csv") == io::read_file(root / "det_b" / "metrics.csv");
  const bool history = io::read_file(root / "det_a" / "history.csv") == io::read_file(root / "det_b" / "history.csv");
  const auto size = std::filesystem::file_size(root / "det_a" / "model.ckpt");
  return {ckpt && metrics, std::string("checkpoint (") + std::to_string(size) + " bytes) " +
                               (ckpt ? "identical" : "DIFFERS") + ", metrics.csv " + (metrics ? "identical" : "DIFFERS") +
                               ", history.csv " + (history ? "identical" : "differs")};
}

// ---- 8 --------------------------------------------------------------------

// First decreasing, then increasing: non-increasing up to an interior minimum
// and non-decreasing after it.
bool u_shaped(const std::vector<double>& v) {
  if (v.size() < 3) return false;
  const std::size_t k = static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
  if (k == 0 || k + 1 == v.size()) return false;
  for (std::size_t i = 1; i <= k; ++i)
    if (v[i] > v[i - 1]) return false;
  for (std::size_t i = k + 1; i < v.size(); ++i)
    if (v[i] < v[i - 1]) return false;
  return true;
}

Outcome sweep_shape(const std::filesystem::path& city) {
  const std::filesystem::path out = city.parent_path() / "grid.csv";
  const CliRun r = cli("grid --data " + city.string() + " --out " + out.string());
  if (r.code != 0) return {false, "grid exited with " + std::to_string(r.code)};
  const io::CsvTable t = io::read_csv(out);
  std::map<long long, std::vector<double>> by_m, by_w;
  const std::size_t cm = *t.column("m"), cw = *t.column("window"), cr = *t.column("test_rmse");
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    by_m[t.integer(i, cm)].push_back(t.number(i, cr));
    by_w[t.integer(i, cw)].push_back(t.number(i, cr));
  }
  // Profile along one axis: mean over the other axis.
  auto profile = [](const std::map<long long, std::vector<double>>& m) {
    std::vector<double> p;
    for (const auto& [k, v] : m) p.push_back(mean(v));
    return p;
  };
  const std::vector<double> pm = profile(by_m), pw = profile(by_w);
  const bool um = u_shaped(pm), uw = u_shaped(pw);
  std::ostringstream os;
  os << "mean test RMSE over M {";
  for (const auto& [k, v] : by_m) os << k << (k == by_m.rbegin()->first ? "" : ",");
  os << "}: " << list(pm) << " (" << (um ? "U" : "not U") << "); over window {";
  for (const auto& [k, v] : by_w) os << k << (k == by_w.rbegin()->first ? "" : ",");
  os << "}: " << list(pw) << " (" << (uw ? "U" : "not U") << ")";
  return {um && uw, os.str()};
}

// ---- 9 --------------------------------------------------------------------

Outcome metric_units() {
  const double y[] = {10.0};
  const double yhat[] = {12.0};
  const Metrics m = score(yhat, y);
  const bool metrics_exact = m.rmse == 2.0 && m.mape == 0.2;
  const double two[] = {0.0, 2.0};
  const Normalizer n = Normalizer::fit(two, 1);
  const bool norm_exact = n.mean()[0] == 1.0 && n.stddev()[0] == 1.0;

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 5000.0);
  std::vector<double> values(2 * 500);
  for (double& v : values) v = u(rng);
  const Normalizer z = Normalizer::fit(values, 2);
  double worst = 0.0;
  for (std::size_t r = 0; r < 500; ++r) {
    std::vector<double> row{values[2 * r], values[2 * r + 1]};
    z.apply(row);
    z.invert(row);
    for (int k = 0; k < 2; ++k) worst = std::max(worst, std::abs(row[k] - values[2 * r + k]) / std::max(1.0, std::abs(values[2 * r + k])));
  }
  std::ostringstream os;
  os << "rmse " << m.rmse << " mape " << m.mape << " (expect 2, 0.2); normalizer {0,2} mean " << n.mean()[0]
     << " std " << n.stddev()[0] << "; round-trip max rel error " << fmt("%.1e", worst) << " (tol 1e-12)";
  return {metrics_exact && norm_exact && worst < kRoundTripTolerance, os.str()};
}

int run() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& fn, double budget_s = 0.0) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = seconds_since(t0);
    if (budget_s > 0.0 && s >= budget_s) {
      o.pass = false;
      o.detail += "; over the " + fmt("%.0f", budget_s) + "s budget";
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), s);
    std::fflush(stdout);
  };

  report(1, "gradient integrity", gradient_integrity, kGradBudgetS);
  report(2, "forward oracles", forward_oracles, kForwardBudgetS);
  report(3, "sampler equivalence", sampler_equivalence, kSamplerBudgetS);
  report(4, "basis equivalence", basis_equivalence);

  Benchmark bench;
  bool have_bench = false;
  report(5, "synthetic benchmark", [&] {
    bench = run_benchmark();
    have_bench = true;
    return synthetic_benchmark(bench);
  });
  report(6, "inductive contract", [&] {
    if (!have_bench) return Outcome{false, "benchmark did not run"};
    return inductive_contract(bench);
  });

  testing::TempDir dir("acceptance");
  const std::filesystem::path city = dir.path() / "city";
  const CliRun synth = cli("synth --out " + city.string());
  report(7, "determinism", [&] {
    if (synth.code != 0) return Outcome{false, "synth exited with " + std::to_string(synth.code)};
    return determinism(city);
  });
  report(8, "sweep shape", [&] {
    if (synth.code != 0) return Outcome{false, "synth exited with " + std::to_string(synth.code)};
    return sweep_shape(city);
  });
  report(9, "metric and normalizer units", metric_units);

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace moher::acceptance

int main() { return moher::acceptance::run(); }

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "moher/io.hpp"
#include "test_support.hpp"

namespace moher {
namespace {

struct CliResult {
  int code = -1;
  std::string out;
};

CliResult run(const std::string& args) {
  const std::string cmd = std::string(MOHER_CLI_PATH) + " " + args + " 2>/dev/null";
  CliResult r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe) != nullptr) r.out += buf.data();
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

const char* kSmallCity = "--synth_sites_per_mode 6,6,6 --synth_slots 60 --synth_plane_km 4 --synth_zones 4";
const char* kQuickModel =
    "--max_epochs 2 --hidden_dims 4,4 --lstm_hidden 4 --window 3 --samples_per_epoch 64 --gamma_km 1.5 "
    "--na_lstm_max_epochs 2 --na_lstm_hidden 4 --na_lstm_samples_per_epoch 64";

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir("cli");
    ASSERT_EQ(run(std::string(kSmallCity) + " synth --out " + city()).code, 0);
    ASSERT_EQ(run(std::string(kQuickModel) + " train --data " + city() + " --out " + model_dir()).code, 0);
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  static std::string city() { return (dir_->path() / "city").string(); }
  static std::string model_dir() { return (dir_->path() / "run").string(); }
  static std::string ckpt() { return (dir_->path() / "run" / "model.ckpt").string(); }
  static std::filesystem::path path(const char* name) { return dir_->path() / name; }

  static testing::TempDir* dir_;
};

testing::TempDir* Cli::dir_ = nullptr;

TEST_F(Cli, SynthWritesDatasetFiles) {
  for (const char* f : {"sites.csv", "poi.csv", "flows.csv", "archetypes.csv", "config.txt"}) {
    EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(city()) / f)) << f;
  }
  EXPECT_EQ(io::ingest_dir(city()).data.sites.size(), 18u);
}

TEST_F(Cli, TrainWritesCheckpointHistoryAndMetrics) {
  const io::CsvTable h = io::read_csv(std::filesystem::path(model_dir()) / "history.csv");
  EXPECT_EQ(h.rows.size(), 2u);
  const io::CsvTable m = io::read_csv(std::filesystem::path(model_dir()) / "metrics.csv");
  bool has_test = false;
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    has_test = has_test || m.rows[r][*m.column("split")] == "test";
    EXPECT_TRUE(std::isfinite(m.number(r, *m.column("rmse"))));
  }
  EXPECT_TRUE(has_test);
}

TEST_F(Cli, EvaluateReportsModelAndBaselines) {
  const CliResult r = run(std::string(kQuickModel) + " evaluate --data " + city() + " --checkpoint " + ckpt());
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("moher,test,"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("na_ha,test,"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("na_lstm,test,"), std::string::npos) << r.out;

  // Same checkpoint, same numbers.
  const CliResult again = run("evaluate --baselines none --data " + city() + " --checkpoint " + ckpt());
  ASSERT_EQ(again.code, 0);
  const auto line = [](const std::string& s) { return s.substr(s.find("moher,test,"), s.find('\n', s.find("moher,test,")) - s.find("moher,test,")); };
  EXPECT_EQ(line(again.out), line(r.out));
  EXPECT_EQ(run("evaluate --baselines magic --data " + city() + " --checkpoint " + ckpt()).code, 1);
}

TEST_F(Cli, EvaluateScoresPredictionFiles) {
  std::ofstream(path("labels.csv")) << "site_id,slot,in,out\na,1,10,4\nb,1,3,3\n";
  std::ofstream(path("same.csv")) << "site_id,slot,in,out\nb,1,3,3\na,1,10,4\n";
  std::ofstream(path("off.csv")) << "site_id,slot,in,out\na,1,12,4\nb,1,3,3\n";
  const CliResult same = run("evaluate --predictions " + path("same.csv").string() + " --labels " + path("labels.csv").string());
  ASSERT_EQ(same.code, 0);
  EXPECT_NE(same.out.find("file,all,0,0,4"), std::string::npos) << same.out;
  const CliResult off = run("evaluate --predictions " + path("off.csv").string() + " --labels " + path("labels.csv").string());
  ASSERT_EQ(off.code, 0);
  const io::CsvTable t = io::parse_csv(off.out);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_DOUBLE_EQ(t.number(0, *t.column("rmse")), 1.0);   // sqrt(2^2 / 4)
  EXPECT_DOUBLE_EQ(t.number(0, *t.column("mape")), 0.05);  // (2 / 10) / 4

  std::ofstream(path("dup.csv")) << "site_id,slot,in,out\na,1,10,4\na,1,10,4\n";
  EXPECT_EQ(run("evaluate --predictions " + path("same.csv").string() + " --labels " + path("dup.csv").string()).code, 2);
}

TEST_F(Cli, PredictNewSite) {
  const std::string base = "predict --data " + city() + " --checkpoint " + ckpt() + " --x 2 --y 2 --slot 40";
  const CliResult r = run(base + " --mode bike --poi 1,2,3,4,5,6,7,8 --name fresh");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("site_id,slot,in,out"), std::string::npos);
  EXPECT_NE(r.out.find("fresh,41,"), std::string::npos) << r.out;
  EXPECT_EQ(run(base + " --mode plane --poi 1,2,3,4,5,6,7,8").code, 2);
  EXPECT_EQ(run(base + " --mode bike --poi 1,2").code, 2);
  EXPECT_EQ(run(base + " --mode bike").code, 1);
}

TEST_F(Cli, BuildGraphsWritesNodesAndEdges) {
  const std::string out = path("graphs").string();
  const Dataset d = io::ingest_dir(city()).data;
  const CliResult r = run(std::string(kQuickModel) + " build-graphs --data " + city() + " --target " + d.sites[0].name +
                    " --slot 10 --out " + out);
  ASSERT_EQ(r.code, 0);
  const io::CsvTable nodes = io::read_csv(std::filesystem::path(out) / "nodes.csv");
  ASSERT_GT(nodes.rows.size(), 0u);
  EXPECT_EQ(nodes.rows[0][*nodes.column("site_id")], d.sites[0].name);
  EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(out) / "edges.csv"));
  EXPECT_EQ(run("build-graphs --data " + city() + " --target nobody --slot 10").code, 2);
}

TEST_F(Cli, GradcheckPasses) {
  const CliResult r = run("gradcheck --instances 2 --max-nodes 5");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("full,2,"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.find(",false"), std::string::npos) << r.out;
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  EXPECT_EQ(run("--no_such_key 3 synth --out " + path("x").string()).code, 1);
  EXPECT_EQ(run("--batch_size many synth --out " + path("x").string()).code, 1);
  EXPECT_EQ(run("--config /nonexistent.cfg synth --out " + path("x").string()).code, 1);
  EXPECT_EQ(run("train --data /nonexistent --out " + path("x").string()).code, 2);
  EXPECT_EQ(run("evaluate --data " + city() + " --checkpoint /nonexistent.ckpt").code, 2);
  EXPECT_EQ(run(std::string(kQuickModel) + " --learning_rate 1e308 train --data " + city() + " --out " +
                path("diverged").string())
                .code,
            3);
}

TEST_F(Cli, ConfigFileAndOverridesCompose) {
  std::ofstream(path("run.cfg")) << "synth_slots=30\nsynth_sites_per_mode=3,3,3\n";
  ASSERT_EQ(run("--config " + path("run.cfg").string() + " --synth_slots 25 synth --out " + path("c2").string()).code, 0);
  const Dataset d = io::ingest_dir(path("c2")).data;
  EXPECT_EQ(d.sites.size(), 9u);
  EXPECT_EQ(d.slot_count, 25u);
}

}  // namespace
}  // namespace moher

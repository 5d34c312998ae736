// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "moher/autodiff.hpp"
#include "moher/baselines.hpp"
#include "moher/graph.hpp"
#include "moher/synthcity.hpp"
#include "moher/training.hpp"

namespace moher::io {

// ---- CSV ------------------------------------------------------------------

struct CsvTable {
  std::string path;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;  // 1-based source line per row

  std::optional<std::size_t> column(std::string_view name) const;
  /// Throws DataError "<file>:<line>: column '<name>': ..." on bad values.
  double number(std::size_t row, std::size_t col) const;
  long long integer(std::size_t row, std::size_t col) const;
  [[noreturn]] void fail(std::size_t row, std::size_t col, const std::string& what) const;
};

/// Comma-separated, header row required, double quotes for fields that
/// contain commas. Blank lines are skipped.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(std::string_view text, std::string path_label = "<memory>");
std::string format_number(double v);  // %.17g

// ---- dataset files --------------------------------------------------------

struct IngestOptions {
  std::size_t window_hours = 4;  // aggregation window for raw timestamped rows
};

struct DatasetBundle {
  std::filesystem::path sites;
  std::filesystem::path poi;
  std::filesystem::path flows;
  Dataset data;
  bool projected = false;   // sites were given as lat/lon
  bool aggregated = false;  // flows were raw timestamped rows
};

DatasetBundle ingest(const std::filesystem::path& sites, const std::filesystem::path& poi,
                     const std::filesystem::path& flows, const IngestOptions& options = {});
/// Reads sites.csv, poi.csv and flows.csv from a directory.
DatasetBundle ingest_dir(const std::filesystem::path& dir, const IngestOptions& options = {});
Dataset ingest_tables(const CsvTable& sites, const CsvTable& poi, const CsvTable& flows,
                      const IngestOptions& options = {}, DatasetBundle* info = nullptr);

/// Writes sites.csv (x_km, y_km), poi.csv and flows.csv.
void write_dataset(const Dataset& data, const std::filesystem::path& dir);

/// Equirectangular projection about (lat0, lon0), in kilometers.
Point project(double lat, double lon, double lat0, double lon0);

/// Seconds since the Unix epoch from "YYYY-MM-DD[T ]HH:MM[:SS][Z]" or a
/// plain integer.
std::int64_t parse_timestamp(std::string_view text);

// ---- configuration --------------------------------------------------------

struct RunConfig {
  TrainConfig train;
  SynthConfig synth;
  NaLstmConfig na_lstm;
  std::uint64_t seed = 1;
  bool deterministic = true;
  std::size_t repeats = 1;
  std::vector<std::size_t> grid_m{5, 10, 20, 40};
  std::vector<std::size_t> grid_window{2, 4, 6, 8};
};

struct ConfigKey {
  std::string name;
  std::string help;
};

/// Every settable key, sorted by name.
const std::vector<ConfigKey>& config_keys();
/// Throws UsageError for unknown keys or unparsable values.
void set_config(RunConfig& config, const std::string& key, const std::string& value);
std::string get_config(const RunConfig& config, const std::string& key);
/// "key=value" lines, '#' comments, surrounding blanks ignored.
std::map<std::string, std::string> parse_config_text(std::string_view text, const std::string& label);
void load_config_file(RunConfig& config, const std::filesystem::path& path);
/// Every key as key=value, one per line, in key order.
std::string echo_config(const RunConfig& config);
/// Propagates the global seed into the component configs.
void apply_seed(RunConfig& config);

// ---- checkpoint -----------------------------------------------------------

struct Checkpoint {
  std::uint32_t version = 1;
  std::string config_echo;
  std::vector<std::string> modes;
  std::vector<std::string> relations;
  Normalizer normalizer;
  std::uint64_t neighbor_budget = 0;
  ad::ParamStore params;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);
/// Throws DataError unless the checkpoint's relation list equals `expected`.
void check_relations(const Checkpoint& checkpoint, const std::vector<std::string>& expected);
std::vector<std::string> relation_names(const std::vector<Mode>& modes);

// ---- reports --------------------------------------------------------------

void write_history(const std::vector<EpochRecord>& history, const std::filesystem::path& path);

struct MetricRow {
  std::string method;
  std::string split;
  Metrics metrics;
};
void write_metrics(const std::vector<MetricRow>& rows, const std::filesystem::path& path);
std::string read_file(const std::filesystem::path& path);

}  // namespace moher::io

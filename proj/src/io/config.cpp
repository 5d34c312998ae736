// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include <algorithm>
#include <charconv>
#include <functional>
#include <sstream>

#include "moher/io.hpp"

namespace moher::io {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  return std::string(s.substr(a, b - a));
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const char* expected) {
  throw UsageError("config key '" + key + "': '" + value + "' is not " + expected);
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty()) bad(key, v, "a non-negative integer");
  return x;
}

std::size_t to_size(const std::string& key, const std::string& v) { return static_cast<std::size_t>(to_u64(key, v)); }

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty()) bad(key, v, "a number");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  bad(key, v, "a boolean");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : v) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::vector<std::size_t> to_sizes(const std::string& key, const std::string& v) {
  std::vector<std::size_t> out;
  for (const std::string& s : split_list(v)) out.push_back(to_size(key, s));
  return out;
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const std::string& s : split_list(v)) out.push_back(to_double(key, s));
  return out;
}

template <typename T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ',';
    if constexpr (std::is_same_v<T, double>) {
      out += format_number(xs[i]);
    } else if constexpr (std::is_same_v<T, std::string>) {
      out += xs[i];
    } else {
      out += std::to_string(xs[i]);
    }
  }
  return out;
}

std::string str(bool b) { return b ? "true" : "false"; }
std::string str(double d) { return format_number(d); }
std::string str(std::size_t n) { return std::to_string(n); }

struct Entry {
  ConfigKey key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define MOHER_SIZE(name, field, help)                                                                   \
  Entry {                                                                                               \
    {name, help}, [](RunConfig& c, const std::string& v) { c.field = to_size(name, v); },              \
        [](const RunConfig& c) { return str(static_cast<std::size_t>(c.field)); }                      \
  }
#define MOHER_DOUBLE(name, field, help)                                                                 \
  Entry {                                                                                               \
    {name, help}, [](RunConfig& c, const std::string& v) { c.field = to_double(name, v); },            \
        [](const RunConfig& c) { return str(c.field); }                                                \
  }
#define MOHER_BOOL(name, field, help)                                                                   \
  Entry {                                                                                               \
    {name, help}, [](RunConfig& c, const std::string& v) { c.field = to_bool(name, v); },              \
        [](const RunConfig& c) { return str(c.field); }                                                \
  }

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t{
        Entry{{"seed", "seed for every random stream"},
              [](RunConfig& c, const std::string& v) { c.seed = to_u64("seed", v); },
              [](const RunConfig& c) { return std::to_string(c.seed); }},
        MOHER_BOOL("deterministic", deterministic, "single-threaded fixed-order execution"),
        MOHER_SIZE("repeats", repeats, "independent training runs; train reports each and their mean"),
        Entry{{"hidden_dims", "relational layer widths, comma separated"},
              [](RunConfig& c, const std::string& v) { c.train.model.hidden_dims = to_sizes("hidden_dims", v); },
              [](const RunConfig& c) { return join(c.train.model.hidden_dims); }},
        MOHER_SIZE("basis_count", train.model.basis_count, "number of shared basis matrices"),
        MOHER_SIZE("lstm_hidden", train.model.lstm_hidden, "LSTM hidden width"),
        MOHER_SIZE("window", train.model.window, "input window length in slots"),
        MOHER_BOOL("use_cross_mode", train.model.use_cross_mode, "allow relations between different modes"),
        MOHER_BOOL("use_poi", train.model.use_poi, "use POI-similarity relations"),
        MOHER_BOOL("use_differences", train.model.use_differences, "use the difference branch"),
        MOHER_BOOL("use_basis_regularization", train.model.use_basis_regularization,
                   "share per-relation weights through basis matrices"),
        MOHER_DOUBLE("gamma_km", train.edges.gamma_km, "geo-proximity cutoff in km"),
        MOHER_DOUBLE("beta", train.edges.beta, "POI cosine threshold"),
        Entry{{"neighbor_budget", "localized graph size M, or 'auto' for the two-hop geo mean"},
              [](RunConfig& c, const std::string& v) {
                c.train.neighbor_budget = v == "auto" ? 0 : to_size("neighbor_budget", v);
              },
              [](const RunConfig& c) {
                return c.train.neighbor_budget == 0 ? std::string("auto") : std::to_string(c.train.neighbor_budget);
              }},
        MOHER_DOUBLE("learning_rate", train.learning_rate, "Adam step size"),
        MOHER_SIZE("batch_size", train.batch_size, "windows per optimizer step"),
        MOHER_SIZE("samples_per_epoch", train.samples_per_epoch, "simulated-new-site windows per epoch"),
        MOHER_SIZE("max_epochs", train.max_epochs, "epoch limit"),
        MOHER_SIZE("patience", train.patience, "epochs without validation improvement before stopping"),
        MOHER_DOUBLE("pseudo_fraction", train.pseudo_fraction, "share of train sites used as pseudo-new sites per epoch"),
        MOHER_SIZE("val_stride", train.val_stride, "validate on every n-th slot"),
        MOHER_SIZE("na_lstm_hidden", na_lstm.hidden, "NA-LSTM hidden width"),
        MOHER_SIZE("na_lstm_max_epochs", na_lstm.max_epochs, "NA-LSTM epoch limit"),
        MOHER_SIZE("na_lstm_samples_per_epoch", na_lstm.samples_per_epoch, "NA-LSTM windows per epoch"),
        MOHER_DOUBLE("na_lstm_learning_rate", na_lstm.learning_rate, "NA-LSTM Adam step size"),
        Entry{{"synth_modes", "mode names, comma separated"},
              [](RunConfig& c, const std::string& v) { c.synth.modes = split_list(v); },
              [](const RunConfig& c) { return join(c.synth.modes); }},
        Entry{{"synth_sites_per_mode", "site count per mode"},
              [](RunConfig& c, const std::string& v) { c.synth.sites_per_mode = to_sizes("synth_sites_per_mode", v); },
              [](const RunConfig& c) { return join(c.synth.sites_per_mode); }},
        Entry{{"synth_capture", "share of latent demand captured by each mode"},
              [](RunConfig& c, const std::string& v) { c.synth.capture = to_doubles("synth_capture", v); },
              [](const RunConfig& c) { return join(c.synth.capture); }},
        MOHER_DOUBLE("synth_plane_km", synth.plane_km, "side of the square city in km"),
        MOHER_SIZE("synth_poi_categories", synth.poi_categories, "POI categories"),
        MOHER_SIZE("synth_zones", synth.zones, "functional zones"),
        MOHER_DOUBLE("synth_zone_radius_km", synth.zone_radius_km, "distance at which zone demand fades out"),
        MOHER_DOUBLE("synth_background", synth.background, "demand level away from every zone"),
        MOHER_SIZE("synth_slots", synth.slots, "number of slots"),
        MOHER_SIZE("synth_slots_per_day", synth.slots_per_day, "slots per day"),
        MOHER_DOUBLE("synth_amplitude", synth.amplitude, "demand scale"),
        MOHER_DOUBLE("synth_noise", synth.noise, "relative noise level"),
        MOHER_DOUBLE("synth_kappa", synth.kappa, "diversion coefficient in [0, 1]"),
        MOHER_DOUBLE("synth_diversion_gamma_km", synth.diversion_gamma_km, "diversion radius in km"),
        Entry{{"grid_m", "neighbor budgets swept by grid"},
              [](RunConfig& c, const std::string& v) { c.grid_m = to_sizes("grid_m", v); },
              [](const RunConfig& c) { return join(c.grid_m); }},
        Entry{{"grid_window", "window lengths swept by grid"},
              [](RunConfig& c, const std::string& v) { c.grid_window = to_sizes("grid_window", v); },
              [](const RunConfig& c) { return join(c.grid_window); }},
    };
    std::sort(t.begin(), t.end(), [](const Entry& a, const Entry& b) { return a.key.name < b.key.name; });
    return t;
  }();
  return table;
}

#undef MOHER_SIZE
#undef MOHER_DOUBLE
#undef MOHER_BOOL

const Entry& find(const std::string& key) {
  for (const Entry& e : entries()) {
    if (e.key.name == key) return e;
  }
  throw UsageError("unknown config key '" + key + "'");
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    for (const Entry& e : entries()) k.push_back(e.key);
    return k;
  }();
  return keys;
}

void set_config(RunConfig& config, const std::string& key, const std::string& value) {
  find(key).set(config, trim(value));
}

std::string get_config(const RunConfig& config, const std::string& key) { return find(key).get(config); }

std::map<std::string, std::string> parse_config_text(std::string_view text, const std::string& label) {
  std::map<std::string, std::string> out;
  std::size_t lineno = 0, pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(label + ":" + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw UsageError(label + ":" + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

void load_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const DataError& e) {
    throw UsageError(e.what());
  }
  for (const auto& [k, v] : parse_config_text(text, path.string())) set_config(config, k, v);
}

std::string echo_config(const RunConfig& config) {
  std::ostringstream os;
  for (const Entry& e : entries()) os << e.key.name << '=' << e.get(config) << '\n';
  return os.str();
}

void apply_seed(RunConfig& config) {
  config.train.seed = config.seed;
  config.synth.seed = config.seed;
  config.na_lstm.seed = config.seed;
  config.na_lstm.window = config.train.model.window;
  config.na_lstm.batch_size = config.train.batch_size;
  config.na_lstm.patience = config.train.patience;
  config.na_lstm.val_stride = config.train.val_stride;
}

}  // namespace moher::io

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The moher Authors

#include <algorithm>
#include <array>
#include <chrono>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <unordered_map>

#include "moher/io.hpp"

namespace moher::io {

namespace {

constexpr double kEarthRadiusKm = 6371.0088;

std::size_t require(const CsvTable& t, std::string_view name) {
  const auto c = t.column(name);
  if (!c) throw DataError(t.path + ": missing required column '" + std::string(name) + "'");
  return *c;
}

int parse_int(std::string_view s, std::size_t pos, std::size_t len) {
  if (pos + len > s.size()) throw InvalidInput("timestamp too short");
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, v);
  if (ec != std::errc() || ptr != s.data() + pos + len) throw InvalidInput("bad timestamp field");
  return v;
}

}  // namespace

Point project(double lat, double lon, double lat0, double lon0) {
  const double rad = std::numbers::pi / 180.0;
  return {kEarthRadiusKm * (lon - lon0) * rad * std::cos(lat0 * rad), kEarthRadiusKm * (lat - lat0) * rad};
}

std::int64_t parse_timestamp(std::string_view text) {
  if (!text.empty() && std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    std::int64_t v = 0;
    std::from_chars(text.data(), text.data() + text.size(), v);
    return v;
  }
  try {
    // YYYY-MM-DD[T ]HH:MM[:SS][Z]
    if (text.size() < 16 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
        text[13] != ':') {
      throw InvalidInput("layout");
    }
    const int y = parse_int(text, 0, 4), mo = parse_int(text, 5, 2), d = parse_int(text, 8, 2);
    const int h = parse_int(text, 11, 2), mi = parse_int(text, 14, 2);
    int sec = 0;
    std::size_t rest = 16;
    if (text.size() >= 19 && text[16] == ':') {
      sec = parse_int(text, 17, 2);
      rest = 19;
    }
    if (rest < text.size() && !(rest + 1 == text.size() && text[rest] == 'Z')) throw InvalidInput("trailing text");
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) throw InvalidInput("out of range");
    const auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
    return static_cast<std::int64_t>(days) * 86400 + h * 3600 + mi * 60 + sec;
  } catch (const InvalidInput&) {
    throw InvalidInput("unrecognized timestamp '" + std::string(text) + "'");
  }
}

Dataset ingest_tables(const CsvTable& sites, const CsvTable& poi, const CsvTable& flows,
                      const IngestOptions& options, DatasetBundle* info) {
  if (options.window_hours == 0 || 24 % options.window_hours != 0) {
    throw InvalidInput("window_hours must divide 24");
  }
  Dataset data;
  data.slot_hours = options.window_hours;

  // sites
  const std::size_t c_id = require(sites, "site_id");
  const std::size_t c_mode = require(sites, "mode");
  const auto c_x = sites.column("x_km"), c_y = sites.column("y_km");
  const auto c_lat = sites.column("lat"), c_lon = sites.column("lon");
  const bool planar = c_x && c_y;
  if (!planar && !(c_lat && c_lon)) throw DataError(sites.path + ": need x_km,y_km or lat,lon columns");
  std::unordered_map<std::string, SiteUid> by_name;
  std::vector<std::pair<double, double>> latlon;
  for (std::size_t r = 0; r < sites.rows.size(); ++r) {
    const std::string& name = sites.rows[r][c_id];
    if (name.empty()) sites.fail(r, c_id, "empty site id");
    if (by_name.contains(name)) sites.fail(r, c_id, "duplicate site id '" + name + "'");
    const std::string& mode_name = sites.rows[r][c_mode];
    if (mode_name.empty()) sites.fail(r, c_mode, "empty mode");
    auto mode = data.find_mode(mode_name);
    if (!mode) {
      data.modes.push_back({static_cast<ModeId>(data.modes.size()), mode_name});
      mode = data.modes.back().id;
    }
    Site s;
    s.uid = static_cast<SiteUid>(data.sites.size());
    s.name = name;
    s.mode = *mode;
    if (planar) {
      s.coord = {sites.number(r, *c_x), sites.number(r, *c_y)};
    } else {
      const double lat = sites.number(r, *c_lat), lon = sites.number(r, *c_lon);
      if (lat < -90.0 || lat > 90.0) sites.fail(r, *c_lat, "latitude out of range");
      if (lon < -180.0 || lon > 180.0) sites.fail(r, *c_lon, "longitude out of range");
      latlon.emplace_back(lat, lon);
    }
    by_name.emplace(name, s.uid);
    data.sites.push_back(std::move(s));
  }
  if (data.sites.empty()) throw DataError(sites.path + ": no sites");
  if (!planar) {
    double lat0 = 0.0, lon0 = 0.0;
    for (const auto& [lat, lon] : latlon) {
      lat0 += lat;
      lon0 += lon;
    }
    lat0 /= static_cast<double>(latlon.size());
    lon0 /= static_cast<double>(latlon.size());
    for (std::size_t i = 0; i < latlon.size(); ++i) {
      data.sites[i].coord = project(latlon[i].first, latlon[i].second, lat0, lon0);
    }
  }

  // poi
  const std::size_t p_id = require(poi, "site_id");
  std::vector<std::size_t> cats;
  for (std::size_t c = 0; c < poi.header.size(); ++c) {
    if (c != p_id) cats.push_back(c);
  }
  if (cats.empty()) throw DataError(poi.path + ": no POI category columns");
  std::vector<bool> has_poi(data.sites.size(), false);
  for (std::size_t r = 0; r < poi.rows.size(); ++r) {
    const auto it = by_name.find(poi.rows[r][p_id]);
    if (it == by_name.end()) poi.fail(r, p_id, "unknown site id '" + poi.rows[r][p_id] + "'");
    if (has_poi[it->second]) poi.fail(r, p_id, "duplicate POI row");
    has_poi[it->second] = true;
    std::vector<double>& v = data.sites[it->second].poi;
    for (std::size_t c : cats) {
      const double x = poi.number(r, c);
      if (x < 0.0) poi.fail(r, c, "negative POI count");
      v.push_back(x);
    }
  }
  std::string missing;
  for (std::size_t i = 0; i < has_poi.size(); ++i) {
    if (!has_poi[i]) missing += (missing.empty() ? "" : ", ") + data.sites[i].name;
  }
  if (!missing.empty()) throw DataError(poi.path + ": sites without a POI row: " + missing);

  // flows
  const std::size_t f_id = require(flows, "site_id");
  const std::size_t f_in = require(flows, "in");
  const std::size_t f_out = require(flows, "out");
  const auto f_slot = flows.column("slot");
  const auto f_ts = flows.column("timestamp");
  if (!f_slot && !f_ts) throw DataError(flows.path + ": need a 'slot' or 'timestamp' column");
  data.feature_dim = 2;
  std::vector<std::map<std::int64_t, std::array<double, 2>>> per_site(data.sites.size());
  std::int64_t origin = 0;
  if (!f_slot) {
    std::int64_t first = std::numeric_limits<std::int64_t>::max();
    for (std::size_t r = 0; r < flows.rows.size(); ++r) {
      try {
        first = std::min(first, parse_timestamp(flows.rows[r][*f_ts]));
      } catch (const InvalidInput& e) {
        flows.fail(r, *f_ts, e.what());
      }
    }
    origin = first == std::numeric_limits<std::int64_t>::max() ? 0 : (first - ((first % 86400) + 86400) % 86400);
  }
  const std::int64_t window_s = static_cast<std::int64_t>(options.window_hours) * 3600;
  for (std::size_t r = 0; r < flows.rows.size(); ++r) {
    const auto it = by_name.find(flows.rows[r][f_id]);
    if (it == by_name.end()) flows.fail(r, f_id, "unknown site id '" + flows.rows[r][f_id] + "'");
    const double in = flows.number(r, f_in), out = flows.number(r, f_out);
    if (in < 0.0) flows.fail(r, f_in, "negative flow");
    if (out < 0.0) flows.fail(r, f_out, "negative flow");
    std::int64_t slot = 0;
    if (f_slot) {
      slot = flows.integer(r, *f_slot);
      if (slot < 0) flows.fail(r, *f_slot, "negative slot");
      if (per_site[it->second].contains(slot)) flows.fail(r, *f_slot, "duplicate slot for this site");
    } else {
      slot = (parse_timestamp(flows.rows[r][*f_ts]) - origin) / window_s;
    }
    auto& cell = per_site[it->second][slot];
    cell[0] += in;
    cell[1] += out;
  }
  if (info != nullptr) {
    info->projected = !planar;
    info->aggregated = !f_slot;
  }

  missing.clear();
  std::size_t zero_coverage = 0;
  for (std::size_t i = 0; i < per_site.size(); ++i) {
    if (per_site[i].empty()) {
      ++zero_coverage;
      if (zero_coverage <= 20) missing += (missing.empty() ? "" : ", ") + data.sites[i].name;
    }
  }
  if (zero_coverage > 0) {
    throw DataError(flows.path + ": " + std::to_string(zero_coverage) + " zero-coverage sites: " + missing +
                    (zero_coverage > 20 ? ", ..." : ""));
  }

  data.flows.resize(data.sites.size());
  for (std::size_t i = 0; i < per_site.size(); ++i) {
    const auto& m = per_site[i];
    const std::int64_t lo = m.begin()->first, hi = m.rbegin()->first;
    if (f_slot && static_cast<std::size_t>(hi - lo + 1) != m.size()) {
      throw DataError(flows.path + ": site '" + data.sites[i].name + "' has gaps between slots " +
                      std::to_string(lo) + " and " + std::to_string(hi));
    }
    FlowSeries& f = data.flows[i];
    f.site = data.sites[i].uid;
    f.dim = 2;
    f.start_slot = static_cast<std::size_t>(lo);
    f.values.assign(static_cast<std::size_t>(hi - lo + 1) * 2, 0.0);
    for (const auto& [slot, v] : m) {
      f.values[static_cast<std::size_t>(slot - lo) * 2] = v[0];
      f.values[static_cast<std::size_t>(slot - lo) * 2 + 1] = v[1];
    }
    data.slot_count = std::max(data.slot_count, f.end_slot());
  }
  data.validate();
  return data;
}

DatasetBundle ingest(const std::filesystem::path& sites, const std::filesystem::path& poi,
                     const std::filesystem::path& flows, const IngestOptions& options) {
  DatasetBundle b;
  b.sites = sites;
  b.poi = poi;
  b.flows = flows;
  b.data = ingest_tables(read_csv(sites), read_csv(poi), read_csv(flows), options, &b);
  return b;
}

DatasetBundle ingest_dir(const std::filesystem::path& dir, const IngestOptions& options) {
  return ingest(dir / "sites.csv", dir / "poi.csv", dir / "flows.csv", options);
}

void write_dataset(const Dataset& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw DataError((dir / name).string() + ": cannot open for writing");
    return out;
  };
  {
    std::ofstream out = open("sites.csv");
    out << "site_id,mode,x_km,y_km\n";
    for (const Site& s : data.sites) {
      out << s.name << ',' << data.modes.at(s.mode).name << ',' << format_number(s.coord.x_km) << ','
          << format_number(s.coord.y_km) << '\n';
    }
  }
  {
    std::ofstream out = open("poi.csv");
    out << "site_id";
    for (std::size_t k = 0; k < data.poi_dim(); ++k) out << ",cat_" << k;
    out << '\n';
    for (const Site& s : data.sites) {
      out << s.name;
      for (double v : s.poi) out << ',' << format_number(v);
      out << '\n';
    }
  }
  {
    if (data.feature_dim != 2) throw InvalidInput("write_dataset: flows need exactly two channels");
    std::ofstream out = open("flows.csv");
    out << "site_id,slot,in,out\n";
    for (const FlowSeries& f : data.flows) {
      const std::string& name = data.site(f.site).name;
      for (std::size_t t = f.start_slot; t < f.end_slot(); ++t) {
        const auto v = f.at(t);
        out << name << ',' << t << ',' << format_number(v[0]) << ',' << format_number(v[1]) << '\n';
      }
    }
  }
}

}  // namespace moher::io

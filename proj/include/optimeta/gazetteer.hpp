// Copyright 2026 The optimeta-cpp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Administrative units for spatial extents, resolved through a
// Geonames-compatible web service:
//
//   extendedFindNearbyJSON?lat=&lng=   hierarchy at a coordinate
//   getJSON?geonameId=                 a unit with its bounding box
//   hierarchyJSON?geonameId=           the path down to a unit
//   searchJSON?name_startsWith=        name suggestions
//
// Coordinates are rounded to four decimals before querying, so repeated
// queries while an author edits a geometry hit the cache.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "optimeta/error.hpp"
#include "optimeta/geo.hpp"
#include "optimeta/http.hpp"

namespace optimeta {

inline constexpr std::int64_t kEarthGeonameId = 6295630;

inline AdminUnit earth_unit() { return AdminUnit{"Earth", kEarthGeonameId, std::nullopt}; }
inline AdminPath root_path() { return AdminPath{{earth_unit()}}; }

/// Longest common prefix by unit id; never shorter than the root.
inline AdminPath common_prefix(const std::vector<AdminPath>& paths) {
  if (paths.empty()) return root_path();
  AdminPath out = paths.front();
  for (const auto& p : paths) {
    std::size_t n = 0;
    while (n < out.units.size() && n < p.units.size() &&
           out.units[n].gazetteer_id == p.units[n].gazetteer_id)
      ++n;
    out.units.resize(n);
  }
  if (out.units.empty() || out.units.front().gazetteer_id != kEarthGeonameId) return root_path();
  return out;
}

/// Coordinates queried for one feature: every vertex (ring closures
/// dropped) up to eight, taken at a uniform stride when there are more,
/// plus the vertex average of a polygon's exterior ring.
inline std::vector<Position> sample_positions(const Feature& feature, std::size_t cap = 8) {
  std::vector<Position> vertices;
  if (const auto* poly = std::get_if<Polygon>(&feature.geometry)) {
    for (const auto& ring : poly->rings)
      vertices.insert(vertices.end(), ring.begin(), ring.end() - 1);
  } else {
    for_each_position(feature.geometry, [&](const Position& p) { vertices.push_back(p); });
  }
  std::vector<Position> out;
  if (vertices.size() <= cap) {
    out = vertices;
  } else {
    for (std::size_t i = 0; i < cap; ++i) out.push_back(vertices[i * vertices.size() / cap]);
  }
  if (const auto* poly = std::get_if<Polygon>(&feature.geometry)) {
    const auto& ring = poly->rings.front();
    double lon = 0, lat = 0;
    std::size_t n = ring.size() - 1;
    for (std::size_t i = 0; i < n; ++i) {
      lon += ring[i].lon;
      lat += ring[i].lat;
    }
    out.push_back(Position{lon / static_cast<double>(n), lat / static_cast<double>(n), {}});
  }
  return out;
}

inline std::vector<Position> sample_positions(const GeoExtent& extent) {
  std::vector<Position> out;
  for (const auto& f : extent.features) {
    auto s = sample_positions(f);
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

/// Four-decimal text used both as query value and cache key.
inline std::string round4(double v) {
  char buf[32];
  double r = std::round(v * 10000.0) / 10000.0;
  if (r == 0) r = 0;  // no "-0.0000"
  std::snprintf(buf, sizeof buf, "%.4f", r);
  return buf;
}

/// Response bodies keyed by request identity, with a time-to-live and an
/// optional directory for persistence across runs. Last writer wins.
class ResponseCache {
 public:
  using Clock = std::function<std::chrono::system_clock::time_point()>;

  explicit ResponseCache(std::chrono::seconds ttl = std::chrono::hours(24 * 7),
                         std::optional<std::filesystem::path> dir = std::nullopt,
                         Clock clock = [] { return std::chrono::system_clock::now(); })
      : ttl_(ttl), dir_(std::move(dir)), clock_(std::move(clock)) {
    if (dir_) std::filesystem::create_directories(*dir_);
  }

  std::optional<std::string> get(const std::string& key) {
    std::lock_guard lock(mutex_);
    auto now = clock_();
    if (auto it = entries_.find(key); it != entries_.end()) {
      if (now - it->second.stored_at <= ttl_) return it->second.body;
      entries_.erase(it);
    }
    if (!dir_) return std::nullopt;
    std::ifstream in(file_for(key), std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      auto j = Json::parse(buf.str());
      std::chrono::system_clock::time_point stored{std::chrono::seconds(j.at("stored_at").get<long long>())};
      if (now - stored > ttl_) return std::nullopt;
      auto body = j.at("body").get<std::string>();
      entries_[key] = Entry{body, stored};
      return body;
    } catch (const Json::exception&) {
      return std::nullopt;  // unreadable cache entries are misses
    }
  }

  void put(const std::string& key, const std::string& body) {
    std::lock_guard lock(mutex_);
    auto now = clock_();
    entries_[key] = Entry{body, now};
    if (!dir_) return;
    Json j = {{"key", key},
              {"stored_at", std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count()},
              {"body", body}};
    auto path = file_for(key);
    auto tmp = path;
    tmp += ".tmp";
    std::ofstream(tmp, std::ios::binary) << j.dump();
    std::filesystem::rename(tmp, path);
  }

 private:
  struct Entry {
    std::string body;
    std::chrono::system_clock::time_point stored_at;
  };

  std::filesystem::path file_for(const std::string& key) const {
    return *dir_ / (text::percent_encode(key) + ".json");
  }

  std::chrono::seconds ttl_;
  std::optional<std::filesystem::path> dir_;
  Clock clock_;
  std::mutex mutex_;
  std::map<std::string, Entry> entries_;
};

struct GazetteerConfig {
  std::string base_url = "http://api.geonames.org";
  std::optional<std::string> username;
  std::chrono::milliseconds min_spacing{1000};
  http::RatePolicy policy{std::chrono::milliseconds(1000), 2, std::chrono::milliseconds(1000),
                    std::chrono::milliseconds(8000)};
};

class GazetteerClient {
 public:
  GazetteerClient(std::shared_ptr<http::Transport> transport, GazetteerConfig config,
                  std::shared_ptr<ResponseCache> cache = std::make_shared<ResponseCache>(),
                  http::SleepFn sleep = http::real_sleep())
      : transport_(std::move(transport)),
        config_(std::move(config)),
        cache_(std::move(cache)),
        sleep_(sleep),
        limiter_(std::make_shared<http::RateLimiter>(config_.min_spacing, sleep)) {}

  /// Hierarchy at a coordinate, rooted at Earth. Open ocean yields [Earth].
  AdminPath reverse_geocode(double lon, double lat) const {
    if (lon < -180 || lon > 180 || lat < -90 || lat > 90)
      throw Error(Errc::PreconditionViolated, "coordinate outside WGS 84 ranges");
    auto lat4 = round4(lat);
    auto lon4 = round4(lon);
    auto body = fetch("extendedFindNearby:" + lat4 + "," + lon4, "/extendedFindNearbyJSON",
                      {{"lat", lat4}, {"lng", lon4}});
    auto doc = jsonutil::parse(body, Errc::SchemaError);
    check_status(doc);
    auto list = jsonutil::member(doc, "geonames");
    if (!list || !list->is_array() || list->empty()) return root_path();
    return rooted(units_from(*list));
  }

  /// Longest common prefix of the paths at every sampled coordinate.
  AdminPath smallest_enclosing_unit(const GeoExtent& extent) const {
    if (extent.empty()) throw Error(Errc::EmptyExtent, "extent has no features");
    std::vector<AdminPath> paths;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& p : sample_positions(extent)) {
      if (!seen.emplace(round4(p.lon), round4(p.lat)).second) continue;
      paths.push_back(reverse_geocode(p.lon, p.lat));
      if (paths.back().is_root_only()) break;  // cannot get shorter
    }
    return common_prefix(paths);
  }

  /// The gazetteer's published bounding box for a unit.
  BoundingBox unit_bbox(const AdminUnit& unit) const {
    if (unit.gazetteer_id <= 0) throw Error(Errc::UnknownUnit, "unit has no gazetteer id");
    auto id = std::to_string(unit.gazetteer_id);
    auto body = fetch("get:" + id, "/getJSON", {{"geonameId", id}});
    auto doc = jsonutil::parse(body, Errc::SchemaError);
    check_status(doc);
    auto bbox = jsonutil::member(doc, "bbox");
    if (!bbox) throw Error(Errc::UnknownUnit, "unit " + id + " has no bounding box");
    try {
      return BoundingBox::checked(number(*bbox, "west"), number(*bbox, "south"),
                                  number(*bbox, "east"), number(*bbox, "north"));
    } catch (const Error& e) {
      // e.g. units crossing the antimeridian (west > east)
      throw Error(Errc::SchemaError, "unit " + id + ": " + e.detail());
    }
  }

  /// Path from Earth down to (and including) the unit.
  AdminPath hierarchy(std::int64_t gazetteer_id) const {
    auto id = std::to_string(gazetteer_id);
    auto body = fetch("hierarchy:" + id, "/hierarchyJSON", {{"geonameId", id}});
    auto doc = jsonutil::parse(body, Errc::SchemaError);
    check_status(doc);
    auto list = jsonutil::member(doc, "geonames");
    if (!list || !list->is_array()) throw Error(Errc::SchemaError, "hierarchy has no geonames");
    return rooted(units_from(*list));
  }

  /// Units whose name starts with `prefix` (two characters at least); with
  /// a constraint, only units whose own path extends it.
  std::vector<AdminUnit> suggest_units(std::string_view prefix,
                                       const std::optional<AdminPath>& constraint = std::nullopt) const {
    auto p = text::trim(prefix);
    if (p.size() < 2)
      throw Error(Errc::PreconditionViolated, "suggestions need at least two characters");
    std::string q(p);
    auto body = fetch("search:" + text::to_lower(q), "/searchJSON",
                      {{"name_startsWith", q}, {"maxRows", "10"}});
    auto doc = jsonutil::parse(body, Errc::SchemaError);
    check_status(doc);
    std::vector<AdminUnit> out;
    auto list = jsonutil::member(doc, "geonames");
    if (!list || !list->is_array()) return out;
    for (auto& unit : units_from(*list)) {
      if (!text::starts_with_icase(unit.name, q)) continue;
      if (constraint) {
        auto path = hierarchy(unit.gazetteer_id);
        if (!(constraint->is_prefix_of(path) && path.units.size() > constraint->units.size()))
          continue;
      }
      out.push_back(std::move(unit));
    }
    return out;
  }

 private:
  static double number(const Json& obj, const char* key) {
    auto v = jsonutil::member(obj, key);
    if (!v) throw Error(Errc::SchemaError, std::string("bbox lacks ") + key);
    if (v->is_number()) return v->get<double>();
    if (v->is_string()) {
      try {
        return std::stod(v->get<std::string>());
      } catch (const std::exception&) {
      }
    }
    throw Error(Errc::SchemaError, std::string("bbox ") + key + " is not a number");
  }

  static void check_status(const Json& doc) {
    auto status = jsonutil::member(doc, "status");
    if (!status) return;
    int value = status->value("value", 0);
    auto message = status->value("message", std::string("gazetteer error"));
    switch (value) {
      case 11:  // invalid parameter / not found
      case 15:  // no result found
        throw Error(Errc::UnknownUnit, message);
      case 18:  // daily limit
      case 19:  // hourly limit
      case 20:  // weekly limit
        throw Error(Errc::RateLimited, message);
      default:
        throw Error(Errc::GazetteerUnavailable, message);
    }
  }

  static std::vector<AdminUnit> units_from(const Json& list) {
    std::vector<AdminUnit> out;
    for (const auto& g : list) {
      auto name = jsonutil::opt_string(g, "toponymName");
      if (!name || name->empty()) name = jsonutil::opt_string(g, "name");
      auto id = jsonutil::member(g, "geonameId");
      if (!name || name->empty() || !id || !id->is_number_integer()) continue;
      out.push_back(AdminUnit{*name, id->get<std::int64_t>(), std::nullopt});
    }
    return out;
  }

  static AdminPath rooted(std::vector<AdminUnit> units) {
    if (units.empty() || units.front().gazetteer_id != kEarthGeonameId)
      units.insert(units.begin(), earth_unit());
    return AdminPath{std::move(units)};
  }

  std::string fetch(const std::string& cache_key, std::string_view path,
                    std::vector<std::pair<std::string, std::string>> params) const {
    if (auto hit = cache_->get(cache_key)) return *hit;
    if (config_.username) params.emplace_back("username", *config_.username);
    http::Request request{"GET", http::build_url(config_.base_url, path, params), {}, {}};
    auto send = [&] {
      auto response = limiter_->run([&] { return transport_->send(request); });
      if (response.status == 429) throw Error(Errc::RateLimited, "gazetteer answered 429");
      if (response.status != 200)
        throw Error(Errc::GazetteerUnavailable,
                    "gazetteer answered HTTP " + std::to_string(response.status));
      return response.body;
    };
    auto body = http::with_backoff(config_.policy, sleep_, send);
    // Error statuses are not cached; a sound body is.
    auto doc = jsonutil::parse(body, Errc::SchemaError);
    if (!jsonutil::member(doc, "status")) cache_->put(cache_key, body);
    return body;
  }

  std::shared_ptr<http::Transport> transport_;
  GazetteerConfig config_;
  std::shared_ptr<ResponseCache> cache_;
  http::SleepFn sleep_;
  std::shared_ptr<http::RateLimiter> limiter_;
};

}  // namespace optimeta

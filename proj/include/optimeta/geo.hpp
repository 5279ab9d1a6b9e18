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

// Spatial extents of an article: a GeoJSON FeatureCollection in WGS 84
// restricted to points, line strings and polygons (rectangles are
// polygons), plus a provenance statement and the fixed CC-0 licence.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "optimeta/error.hpp"
#include "optimeta/jsonutil.hpp"
#include "optimeta/text.hpp"

namespace optimeta {

inline constexpr std::string_view kGeodataLicence = "CC-0";

struct Position {
  double lon = 0;
  double lat = 0;
  std::optional<double> alt;

  friend bool operator==(const Position&, const Position&) = default;
};

struct Point {
  Position position;
  friend bool operator==(const Point&, const Point&) = default;
};

struct LineString {
  std::vector<Position> positions;
  friend bool operator==(const LineString&, const LineString&) = default;
};

/// First ring is the exterior; further rings are holes. Rings are closed.
struct Polygon {
  std::vector<std::vector<Position>> rings;
  friend bool operator==(const Polygon&, const Polygon&) = default;
};

using Geometry = std::variant<Point, LineString, Polygon>;

/// Axis-aligned rectangle as a closed counter-clockwise Polygon.
inline Polygon make_rectangle(double west, double south, double east, double north) {
  return Polygon{{{{west, south, {}}, {east, south, {}}, {east, north, {}},
                   {west, north, {}}, {west, south, {}}}}};
}

struct Feature {
  Geometry geometry;
  Json properties = nullptr;   // any JSON value, usually an object
  std::optional<Json> id;
  Json geometry_members = Json::object();  // foreign members of the geometry
  Json members = Json::object();           // foreign members of the feature

  friend bool operator==(const Feature&, const Feature&) = default;
};

struct BoundingBox {
  double west = 0;
  double south = 0;
  double east = 0;
  double north = 0;

  /// Throws CoordinateOutOfRange unless west <= east, south <= north and
  /// all limits lie in WGS 84 ranges.
  static BoundingBox checked(double west, double south, double east, double north) {
    if (!(west >= -180 && east <= 180 && south >= -90 && north <= 90) || west > east ||
        south > north)
      throw Error(Errc::CoordinateOutOfRange,
                  "invalid bounding box w=" + text::format_decimal(west) +
                      " s=" + text::format_decimal(south) + " e=" + text::format_decimal(east) +
                      " n=" + text::format_decimal(north));
    return BoundingBox{west, south, east, north};
  }

  bool contains(const Position& p) const {
    return p.lon >= west && p.lon <= east && p.lat >= south && p.lat <= north;
  }
  bool contains(const BoundingBox& b) const {
    return b.west >= west && b.east <= east && b.south >= south && b.north <= north;
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct AdminUnit {
  std::string name;
  std::int64_t gazetteer_id = 0;
  std::optional<BoundingBox> bbox;

  friend bool operator==(const AdminUnit&, const AdminUnit&) = default;
};

/// Administrative hierarchy from the root ("Earth") down to the most
/// specific unit.
struct AdminPath {
  std::vector<AdminUnit> units;

  bool is_root_only() const { return units.size() <= 1; }
  const AdminUnit& smallest() const { return units.back(); }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& u : units) out.push_back(u.name);
    return out;
  }

  /// Same unit ids in the same order over the length of `other`.
  bool is_prefix_of(const AdminPath& other) const {
    if (units.size() > other.units.size()) return false;
    for (std::size_t i = 0; i < units.size(); ++i)
      if (units[i].gazetteer_id != other.units[i].gazetteer_id) return false;
    return true;
  }

  friend bool operator==(const AdminPath&, const AdminPath&) = default;
};

struct GeoExtent {
  std::vector<Feature> features;
  std::optional<std::string> provenance;
  std::optional<AdminPath> admin_path;
  Json members = Json::object();  // other collection-level foreign members

  /// Always CC-0; there is no way to set another licence.
  static constexpr std::string_view licence() noexcept { return kGeodataLicence; }

  bool empty() const noexcept { return features.empty(); }

  friend bool operator==(const GeoExtent&, const GeoExtent&) = default;
};

/// Calls `f(position)` for every position of the geometry, ring closures
/// included.
template <typename F>
void for_each_position(const Geometry& g, F&& f) {
  std::visit(
      [&](const auto& geom) {
        using T = std::decay_t<decltype(geom)>;
        if constexpr (std::is_same_v<T, Point>) {
          f(geom.position);
        } else if constexpr (std::is_same_v<T, LineString>) {
          for (const auto& p : geom.positions) f(p);
        } else {
          for (const auto& ring : geom.rings)
            for (const auto& p : ring) f(p);
        }
      },
      g);
}

constexpr std::string_view geometry_type(const Geometry& g) noexcept {
  switch (g.index()) {
    case 0: return "Point";
    case 1: return "LineString";
    default: return "Polygon";
  }
}

/// Minimal box around every coordinate of every feature. No antimeridian
/// wrapping.
inline BoundingBox compute_bbox(const GeoExtent& extent) {
  if (extent.features.empty()) throw Error(Errc::EmptyExtent, "extent has no features");
  BoundingBox box{180, 90, -180, -90};
  for (const auto& feature : extent.features)
    for_each_position(feature.geometry, [&](const Position& p) {
      box.west = std::min(box.west, p.lon);
      box.east = std::max(box.east, p.lon);
      box.south = std::min(box.south, p.lat);
      box.north = std::max(box.north, p.lat);
    });
  return box;
}

// Serialization --------------------------------------------------------------

namespace detail {

inline Json position_json(const Position& p) {
  Json a = Json::array({p.lon, p.lat});
  if (p.alt) a.push_back(*p.alt);
  return a;
}

inline Position parse_position(const Json& j) {
  if (!j.is_array() || j.size() < 2 || j.size() > 3)
    throw Error(Errc::ParseError, "position must be [lon, lat] or [lon, lat, alt]");
  for (const auto& v : j)
    if (!v.is_number()) throw Error(Errc::ParseError, "position members must be numbers");
  Position p{j[0].get<double>(), j[1].get<double>(), std::nullopt};
  if (j.size() == 3) p.alt = j[2].get<double>();
  if (p.lon < -180 || p.lon > 180 || p.lat < -90 || p.lat > 90)
    throw Error(Errc::CoordinateOutOfRange,
                "(" + text::format_decimal(p.lon) + ", " + text::format_decimal(p.lat) +
                    ") is outside WGS 84 ranges");
  return p;
}

inline std::vector<Position> parse_positions(const Json& j) {
  if (!j.is_array()) throw Error(Errc::ParseError, "expected an array of positions");
  std::vector<Position> out;
  out.reserve(j.size());
  for (const auto& p : j) out.push_back(parse_position(p));
  return out;
}

inline Json positions_json(const std::vector<Position>& ps) {
  Json a = Json::array();
  for (const auto& p : ps) a.push_back(position_json(p));
  return a;
}

inline Json foreign_members(const Json& obj, std::initializer_list<std::string_view> known) {
  Json out = Json::object();
  for (const auto& [k, v] : obj.items())
    if (std::find(known.begin(), known.end(), k) == known.end()) out[k] = v;
  return out;
}

inline Geometry parse_geometry(const Json& g) {
  if (!g.is_object()) throw Error(Errc::UnsupportedGeometry, "feature has no geometry");
  auto type = jsonutil::opt_string(g, "type");
  if (!type) throw Error(Errc::ParseError, "geometry has no type");
  if (*type != "Point" && *type != "LineString" && *type != "Polygon")
    throw Error(Errc::UnsupportedGeometry, "geometry type '" + *type + "' is not supported");
  auto coords = jsonutil::member(g, "coordinates");
  if (!coords) throw Error(Errc::ParseError, *type + " has no coordinates");
  if (*type == "Point") return Point{parse_position(*coords)};
  if (*type == "LineString") {
    auto ps = parse_positions(*coords);
    if (ps.size() < 2) throw Error(Errc::ParseError, "LineString needs at least two positions");
    return LineString{std::move(ps)};
  }
  if (!coords->is_array() || coords->empty())
    throw Error(Errc::ParseError, "Polygon needs at least one ring");
  Polygon poly;
  for (const auto& ring_json : *coords) {
    auto ring = parse_positions(ring_json);
    if (ring.size() < 4 || ring.front() != ring.back())
      throw Error(Errc::OpenRing, "polygon ring must be closed with at least four positions");
    poly.rings.push_back(std::move(ring));
  }
  return poly;
}

inline Json geometry_json(const Geometry& g) {
  Json j = Json::object();
  j["type"] = geometry_type(g);
  std::visit(
      [&](const auto& geom) {
        using T = std::decay_t<decltype(geom)>;
        if constexpr (std::is_same_v<T, Point>) {
          j["coordinates"] = position_json(geom.position);
        } else if constexpr (std::is_same_v<T, LineString>) {
          j["coordinates"] = positions_json(geom.positions);
        } else {
          Json rings = Json::array();
          for (const auto& r : geom.rings) rings.push_back(positions_json(r));
          j["coordinates"] = std::move(rings);
        }
      },
      g);
  return j;
}

}  // namespace detail

inline Json to_json(const BoundingBox& b) {
  return Json{{"west", b.west}, {"south", b.south}, {"east", b.east}, {"north", b.north}};
}

inline BoundingBox bbox_from_json(const Json& j) {
  try {
    return BoundingBox::checked(j.at("west").get<double>(), j.at("south").get<double>(),
                                j.at("east").get<double>(), j.at("north").get<double>());
  } catch (const Json::exception& e) {
    throw Error(Errc::ParseError, std::string("bounding box: ") + e.what());
  }
}

inline Json to_json(const AdminUnit& u) {
  Json j = {{"name", u.name}, {"geonameId", u.gazetteer_id}};
  if (u.bbox) j["bbox"] = to_json(*u.bbox);
  return j;
}

inline Json to_json(const AdminPath& path) {
  Json units = Json::array();
  for (const auto& u : path.units) units.push_back(to_json(u));
  return units;
}

inline AdminPath admin_path_from_json(const Json& j) {
  if (!j.is_array()) throw Error(Errc::ParseError, "administrative units must be an array");
  AdminPath path;
  for (const auto& u : j) {
    AdminUnit unit;
    try {
      unit.name = u.at("name").get<std::string>();
      unit.gazetteer_id = u.at("geonameId").get<std::int64_t>();
    } catch (const Json::exception& e) {
      throw Error(Errc::ParseError, std::string("administrative unit: ") + e.what());
    }
    if (unit.name.empty() || unit.gazetteer_id <= 0)
      throw Error(Errc::ParseError, "administrative unit needs a name and a positive id");
    if (auto b = jsonutil::member(u, "bbox")) unit.bbox = bbox_from_json(*b);
    path.units.push_back(std::move(unit));
  }
  return path;
}

/// Canonical FeatureCollection: type, features, provenance, licence,
/// administrativeUnits, then remaining foreign members in input order.
inline Json to_json(const GeoExtent& extent) {
  Json j = Json::object();
  j["type"] = "FeatureCollection";
  Json features = Json::array();
  for (const auto& f : extent.features) {
    Json fj = Json::object();
    fj["type"] = "Feature";
    if (f.id) fj["id"] = *f.id;
    Json g = detail::geometry_json(f.geometry);
    for (const auto& [k, v] : f.geometry_members.items()) g[k] = v;
    fj["geometry"] = std::move(g);
    fj["properties"] = f.properties;
    for (const auto& [k, v] : f.members.items()) fj[k] = v;
    features.push_back(std::move(fj));
  }
  j["features"] = std::move(features);
  if (extent.provenance) j["provenance"] = *extent.provenance;
  j["licence"] = GeoExtent::licence();
  if (extent.admin_path) j["administrativeUnits"] = to_json(*extent.admin_path);
  for (const auto& [k, v] : extent.members.items()) j[k] = v;
  return j;
}

inline std::string serialize_extent(const GeoExtent& extent) { return to_json(extent).dump(); }

inline GeoExtent extent_from_json(const Json& doc) {
  if (!doc.is_object()) throw Error(Errc::ParseError, "GeoJSON must be an object");
  auto type = jsonutil::opt_string(doc, "type");
  if (type != "FeatureCollection")
    throw Error(Errc::ParseError, "expected a FeatureCollection, got '" + type.value_or("") + "'");
  auto features = jsonutil::member(doc, "features");
  if (!features || !features->is_array())
    throw Error(Errc::ParseError, "FeatureCollection needs a features array");

  GeoExtent extent;
  for (const auto& fj : *features) {
    if (!fj.is_object() || jsonutil::opt_string(fj, "type") != "Feature")
      throw Error(Errc::ParseError, "features must be GeoJSON Feature objects");
    Feature f;
    auto g = fj.find("geometry");
    if (g == fj.end()) throw Error(Errc::ParseError, "feature has no geometry member");
    f.geometry = detail::parse_geometry(*g);
    f.geometry_members = detail::foreign_members(*g, {"type", "coordinates"});
    if (auto p = fj.find("properties"); p != fj.end()) f.properties = *p;
    if (auto id = fj.find("id"); id != fj.end()) f.id = *id;
    f.members = detail::foreign_members(fj, {"type", "id", "geometry", "properties"});
    extent.features.push_back(std::move(f));
  }

  if (auto p = doc.find("provenance"); p != doc.end() && !p->is_null()) {
    if (!p->is_string()) throw Error(Errc::ParseError, "provenance must be a string");
    extent.provenance = p->get<std::string>();
  }
  if (auto l = doc.find("licence"); l != doc.end() && !l->is_null()) {
    if (!l->is_string() || l->get<std::string>() != kGeodataLicence)
      throw Error(Errc::InvalidLicence, "spatio-temporal metadata is always CC-0");
  }
  if (auto a = doc.find("administrativeUnits"); a != doc.end() && !a->is_null())
    extent.admin_path = admin_path_from_json(*a);
  extent.members = detail::foreign_members(
      doc, {"type", "features", "provenance", "licence", "administrativeUnits"});
  return extent;
}

/// Parses and checks a GeoJSON FeatureCollection. Throws ParseError,
/// UnsupportedGeometry, CoordinateOutOfRange, OpenRing or InvalidLicence.
inline GeoExtent validate_extent(std::string_view geojson) {
  return extent_from_json(jsonutil::parse(geojson, Errc::ParseError));
}

}  // namespace optimeta

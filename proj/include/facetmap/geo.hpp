// Copyright 2026 The Facetmap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Core value types shared by every other module: points, polygons,
// bounding boxes, categories and the mapped items themselves.

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "facetmap/errors.hpp"

namespace facetmap {

using json = nlohmann::json;

struct Point {
  double lon = 0.0;
  double lat = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

// Outer ring only. The closing vertex is never stored.
struct Polygon {
  std::vector<Point> ring;

  friend bool operator==(const Polygon&, const Polygon&) = default;
};

using Geometry = std::variant<Point, Polygon>;

struct BoundingBox {
  double south = 0.0;
  double west = 0.0;
  double north = 0.0;
  double east = 0.0;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Items are selected into a category by a single raw `key=value` tag.
struct TagPredicate {
  std::string key;
  std::string value;

  friend bool operator==(const TagPredicate&, const TagPredicate&) = default;
};

struct Category {
  std::string id;
  std::string label;
  std::string color;  // "#RRGGBB"
  std::string icon;
  TagPredicate tag_predicate;

  friend bool operator==(const Category&, const Category&) = default;
};

// Facet key (normalized, e.g. "Outdoor Seating") -> atomic value.
using FacetMap = std::map<std::string, std::string>;

struct GeoItem {
  std::string id;
  std::string category_id;
  Geometry geometry;
  FacetMap facets;
  std::optional<std::string> display_name;

  friend bool operator==(const GeoItem&, const GeoItem&) = default;
};

inline bool is_valid(const Point& p) {
  return std::isfinite(p.lon) && std::isfinite(p.lat) && p.lon >= -180.0 &&
         p.lon <= 180.0 && p.lat >= -90.0 && p.lat <= 90.0;
}

inline bool is_valid(const Polygon& poly) {
  if (poly.ring.size() < 3) return false;
  for (const auto& p : poly.ring)
    if (!is_valid(p)) return false;
  return true;
}

inline bool is_valid(const Geometry& g) {
  return std::visit([](const auto& v) { return is_valid(v); }, g);
}

inline bool is_valid(const BoundingBox& b) {
  return is_valid(Point{b.west, b.south}) && is_valid(Point{b.east, b.north}) &&
         b.south < b.north && b.west < b.east;
}

inline void validate(const BoundingBox& b) {
  if (!is_valid(b))
    throw InvalidArgument("invalid bounding box: need south < north, west < east, "
                          "coordinates in range");
}

// Point: identity. Polygon: arithmetic mean of the ring vertices.
inline Point representative_point(const Geometry& geometry) {
  if (const auto* p = std::get_if<Point>(&geometry)) return *p;
  const auto& ring = std::get<Polygon>(geometry).ring;
  double lon = 0.0;
  double lat = 0.0;
  for (const auto& v : ring) {
    lon += v.lon;
    lat += v.lat;
  }
  const auto n = static_cast<double>(ring.size());
  return {lon / n, lat / n};
}

// Boundary inclusive.
inline bool bbox_contains(const BoundingBox& bbox, const Point& p) {
  return p.lon >= bbox.west && p.lon <= bbox.east && p.lat >= bbox.south &&
         p.lat <= bbox.north;
}

inline std::optional<Rgb> parse_hex_color(const std::string& s) {
  if (s.size() != 7 || s[0] != '#') return std::nullopt;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::uint8_t out[3];
  for (int i = 0; i < 3; ++i) {
    const int hi = nibble(s[1 + 2 * i]);
    const int lo = nibble(s[2 + 2 * i]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return Rgb{out[0], out[1], out[2]};
}

inline void validate(const Category& c) {
  if (c.id.empty()) throw InvalidArgument("category id is empty");
  if (!parse_hex_color(c.color))
    throw InvalidArgument("category '" + c.id + "': color must be #RRGGBB, got '" +
                          c.color + "'");
  if (c.tag_predicate.key.empty() || c.tag_predicate.value.empty())
    throw InvalidArgument("category '" + c.id + "': empty tag predicate");
}

// ---------------------------------------------------------------------------
// JSON encoding. Coordinates are written as [lon, lat] pairs.

inline json point_to_json(const Point& p) { return json::array({p.lon, p.lat}); }

inline Point point_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw FormatError("coordinate must be a [lon, lat] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json geometry_to_json(const Geometry& g) {
  if (const auto* p = std::get_if<Point>(&g))
    return {{"type", "point"}, {"coords", point_to_json(*p)}};
  json coords = json::array();
  for (const auto& v : std::get<Polygon>(g).ring) coords.push_back(point_to_json(v));
  return {{"type", "polygon"}, {"coords", std::move(coords)}};
}

inline Polygon polygon_from_json(const json& coords) {
  if (!coords.is_array()) throw FormatError("polygon coords must be an array");
  Polygon poly;
  for (const auto& c : coords) poly.ring.push_back(point_from_json(c));
  if (poly.ring.size() > 3 && poly.ring.front() == poly.ring.back()) poly.ring.pop_back();
  if (!is_valid(poly)) throw FormatError("polygon needs >= 3 valid vertices");
  return poly;
}

inline Geometry geometry_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("geometry must be an object");
  const auto type = j.value("type", std::string{});
  if (!j.contains("coords")) throw FormatError("geometry without coords");
  if (type == "point") {
    auto p = point_from_json(j.at("coords"));
    if (!is_valid(p)) throw FormatError("point out of range");
    return p;
  }
  if (type == "polygon") return polygon_from_json(j.at("coords"));
  throw FormatError("unknown geometry type '" + type + "'");
}

inline json bbox_to_json(const BoundingBox& b) {
  return {{"south", b.south}, {"west", b.west}, {"north", b.north}, {"east", b.east}};
}

inline BoundingBox bbox_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("bbox must be an object");
  try {
    BoundingBox b{j.at("south").get<double>(), j.at("west").get<double>(),
                  j.at("north").get<double>(), j.at("east").get<double>()};
    if (!is_valid(b)) throw FormatError("invalid bbox");
    return b;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bbox: ") + e.what());
  }
}

inline json category_to_json(const Category& c) {
  return {{"id", c.id},
          {"label", c.label},
          {"color", c.color},
          {"icon", c.icon},
          {"tag_key", c.tag_predicate.key},
          {"tag_value", c.tag_predicate.value}};
}

inline Category category_from_json(const json& j) {
  try {
    Category c{j.at("id").get<std::string>(),
               j.value("label", j.at("id").get<std::string>()),
               j.at("color").get<std::string>(),
               j.value("icon", std::string{}),
               {j.at("tag_key").get<std::string>(), j.at("tag_value").get<std::string>()}};
    validate(c);
    return c;
  } catch (const json::exception& e) {
    throw FormatError(std::string("category record: ") + e.what());
  }
}

inline json item_to_json(const GeoItem& item) {
  json j = {{"id", item.id},
            {"category", item.category_id},
            {"geom", geometry_to_json(item.geometry)},
            {"facets", item.facets}};
  if (item.display_name) j["name"] = *item.display_name;
  return j;
}

inline GeoItem item_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("item must be an object");
  try {
    GeoItem item;
    item.id = j.at("id").get<std::string>();
    item.category_id = j.at("category").get<std::string>();
    item.geometry = geometry_from_json(j.at("geom"));
    if (j.contains("facets")) item.facets = j.at("facets").get<FacetMap>();
    if (j.contains("name")) item.display_name = j.at("name").get<std::string>();
    if (item.id.empty()) throw FormatError("item id is empty");
    return item;
  } catch (const json::exception& e) {
    throw FormatError(std::string("item: ") + e.what());
  }
}

}  // namespace facetmap

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

// Overpass JSON reader, tag normalization, category assignment and the
// line-delimited snapshot format.
//
// Snapshot layout (UTF-8, one JSON object per line):
//   line 1   {"format_version":1,"snapshot_id":..,"bbox":{..},"created":"<ISO-8601>"}
//   line 2.. {"id":..,"category":..,"geom":{"type":"point"|"polygon","coords":..},
//             "facets":{..},"name":..}

#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "facetmap/geo.hpp"

namespace facetmap {

// Value of the sentinel standing for "facet absent on this item".
inline constexpr std::string_view kNotSpecified = "NOT SPECIFIED";

enum class ElementType { node, way, relation };

inline std::string_view to_string(ElementType t) {
  switch (t) {
    case ElementType::node: return "node";
    case ElementType::way: return "way";
    case ElementType::relation: return "relation";
  }
  return "node";
}

struct RawElement {
  ElementType type = ElementType::node;
  std::int64_t id = 0;
  // A single position, or the vertex list of a way/relation outline.
  std::variant<Point, std::vector<Point>> coordinates;
  std::map<std::string, std::string> tags;
};

struct OverpassDocument {
  std::vector<RawElement> elements;
  std::size_t dropped = 0;  // entries without usable coordinates
};

using CategoryMappingConfig = std::vector<Category>;

struct DatasetSnapshot {
  std::string id;
  BoundingBox bbox;
  std::string created;  // ISO-8601, UTC
  std::vector<GeoItem> items;

  friend bool operator==(const DatasetSnapshot&, const DatasetSnapshot&) = default;
};

namespace detail {

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::string ascii_upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::optional<Point> overpass_point(const json& j) {
  if (!j.is_object()) return std::nullopt;
  auto lat = j.find("lat");
  auto lon = j.find("lon");
  if (lat == j.end() || lon == j.end() || !lat->is_number() || !lon->is_number())
    return std::nullopt;
  return Point{lon->get<double>(), lat->get<double>()};
}

}  // namespace detail

inline std::string utc_timestamp_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Reads an Overpass JSON response. Nodes need numeric lat/lon; ways and
// relations need a "geometry" array of {lat,lon} or a "center" object.
// Entries lacking coordinates are dropped and counted.
inline OverpassDocument parse_overpass(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), e.byte);
  }
  if (!doc.is_object() || !doc.contains("elements"))
    throw FormatError("Overpass document has no \"elements\" key");
  const auto& elements = doc.at("elements");
  if (!elements.is_array()) throw FormatError("\"elements\" is not an array");

  OverpassDocument out;
  for (const auto& e : elements) {
    if (!e.is_object()) {
      ++out.dropped;
      continue;
    }
    RawElement raw;
    const auto type = e.value("type", std::string{"node"});
    if (type == "node")
      raw.type = ElementType::node;
    else if (type == "way")
      raw.type = ElementType::way;
    else if (type == "relation")
      raw.type = ElementType::relation;
    else {
      ++out.dropped;
      continue;
    }
    if (auto id = e.find("id"); id != e.end() && id->is_number_integer())
      raw.id = id->get<std::int64_t>();

    bool located = false;
    if (raw.type == ElementType::node) {
      if (auto p = detail::overpass_point(e)) {
        raw.coordinates = *p;
        located = true;
      }
    } else {
      if (auto g = e.find("geometry"); g != e.end() && g->is_array()) {
        std::vector<Point> vertices;
        for (const auto& v : *g)
          if (auto p = detail::overpass_point(v)) vertices.push_back(*p);
        if (!vertices.empty()) {
          raw.coordinates = std::move(vertices);
          located = true;
        }
      }
      if (!located) {
        if (auto c = e.find("center"); c != e.end()) {
          if (auto p = detail::overpass_point(*c)) {
            raw.coordinates = *p;
            located = true;
          }
        }
      }
    }
    if (!located) {
      ++out.dropped;
      continue;
    }
    if (auto tags = e.find("tags"); tags != e.end() && tags->is_object()) {
      for (const auto& [k, v] : tags->items())
        if (!k.empty() && v.is_string()) raw.tags.emplace(k, v.get<std::string>());
    }
    out.elements.push_back(std::move(raw));
  }
  return out;
}

// "addr:city" -> "Addr City", "outdoor_seating" -> "Outdoor Seating".
// Keys are lowercased first, so keys differing only by case collapse.
inline std::string normalize_tag_key(std::string_view raw_key) {
  std::string out;
  bool word_start = true;
  for (char c : detail::ascii_lower(raw_key)) {
    if (c == ':' || c == '_' || c == ' ') {
      if (!out.empty() && out.back() != ' ') out.push_back(' ');
      word_start = true;
      continue;
    }
    out.push_back(word_start
                      ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                      : c);
    word_start = false;
  }
  if (!out.empty() && out.back() == ' ') out.pop_back();
  if (out.empty()) return std::string(raw_key);
  return out;
}

// Atomic: separators inside a value ("italian; pizza") are kept verbatim.
inline std::string normalize_facet_value(std::string_view raw_value) {
  return detail::ascii_upper(detail::trim(raw_value));
}

struct CategorizedElement {
  std::string category_id;
  FacetMap facets;
  std::optional<std::string> display_name;
};

// First matching predicate wins. The predicate tag itself is the category,
// so it never becomes a facet.
inline std::optional<CategorizedElement> categorize(const RawElement& element,
                                                    const CategoryMappingConfig& config) {
  const Category* match = nullptr;
  for (const auto& c : config) {
    auto it = element.tags.find(c.tag_predicate.key);
    if (it != element.tags.end() && it->second == c.tag_predicate.value) {
      match = &c;
      break;
    }
  }
  if (!match) return std::nullopt;

  CategorizedElement out{match->id, {}, std::nullopt};
  for (const auto& [key, value] : element.tags) {
    if (key == match->tag_predicate.key) continue;
    auto norm_value = normalize_facet_value(value);
    if (norm_value.empty() || norm_value == kNotSpecified) continue;
    // std::map iteration order makes collisions ("addr:city" vs "addr_city")
    // resolve deterministically to the lexicographically first raw key.
    out.facets.emplace(normalize_tag_key(key), std::move(norm_value));
  }
  if (auto name = element.tags.find("name"); name != element.tags.end()) {
    auto trimmed = detail::trim(name->second);
    if (!trimmed.empty()) out.display_name = std::string(trimmed);
  }
  return out;
}

inline std::optional<std::string> assign_category(const RawElement& element,
                                                  const CategoryMappingConfig& config) {
  auto c = categorize(element, config);
  if (!c) return std::nullopt;
  return std::move(c->category_id);
}

// Closed rings lose the repeated vertex; fewer than three distinct vertices
// degrade to their mean point.
inline std::optional<Geometry> element_geometry(const RawElement& element) {
  if (const auto* p = std::get_if<Point>(&element.coordinates)) {
    if (!is_valid(*p)) return std::nullopt;
    return Geometry{*p};
  }
  auto ring = std::get<std::vector<Point>>(element.coordinates);
  if (ring.size() > 1 && ring.front() == ring.back()) ring.pop_back();
  for (const auto& v : ring)
    if (!is_valid(v)) return std::nullopt;
  if (ring.size() >= 3) return Geometry{Polygon{std::move(ring)}};
  if (ring.empty()) return std::nullopt;
  return representative_point(Geometry{Polygon{ring}});
}

inline void validate(const CategoryMappingConfig& config) {
  std::set<std::string> ids;
  for (const auto& c : config) {
    validate(c);
    if (!ids.insert(c.id).second)
      throw InvalidArgument("duplicate category id '" + c.id + "'");
  }
}

inline CategoryMappingConfig parse_category_config(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), e.byte);
  }
  if (!doc.is_array()) throw FormatError("category config must be a JSON array");
  CategoryMappingConfig config;
  for (const auto& rec : doc) config.push_back(category_from_json(rec));
  validate(config);
  return config;
}

struct IngestSummary {
  std::size_t elements = 0;
  std::size_t uncategorized = 0;
  std::size_t outside_bbox = 0;
  std::size_t invalid_geometry = 0;
  std::size_t duplicate_ids = 0;
  std::map<std::string, std::size_t> kept_per_category;

  std::size_t kept() const {
    std::size_t n = 0;
    for (const auto& [_, k] : kept_per_category) n += k;
    return n;
  }
};

struct SnapshotOptions {
  std::string snapshot_id = "snapshot";
  std::string created;  // empty: current time
};

// Keeps the categorized elements whose representative point lies inside
// `bbox`, in input order.
inline DatasetSnapshot build_snapshot(std::span<const RawElement> elements,
                                      const CategoryMappingConfig& config,
                                      const BoundingBox& bbox,
                                      const SnapshotOptions& options = {},
                                      IngestSummary* summary = nullptr) {
  validate(bbox);
  IngestSummary local;
  auto& s = summary ? *summary : local;
  s = IngestSummary{};
  s.elements = elements.size();

  DatasetSnapshot snap{options.snapshot_id, bbox,
                       options.created.empty() ? utc_timestamp_now() : options.created,
                       {}};
  std::unordered_set<std::string> seen;
  for (const auto& e : elements) {
    auto cat = categorize(e, config);
    if (!cat) {
      ++s.uncategorized;
      continue;
    }
    auto geometry = element_geometry(e);
    if (!geometry) {
      ++s.invalid_geometry;
      continue;
    }
    if (!bbox_contains(bbox, representative_point(*geometry))) {
      ++s.outside_bbox;
      continue;
    }
    auto id = std::string(to_string(e.type)) + "/" + std::to_string(e.id);
    if (!seen.insert(id).second) {
      ++s.duplicate_ids;
      continue;
    }
    ++s.kept_per_category[cat->category_id];
    snap.items.push_back(GeoItem{std::move(id), std::move(cat->category_id),
                                 std::move(*geometry), std::move(cat->facets),
                                 std::move(cat->display_name)});
  }
  return snap;
}

inline std::string write_snapshot(const DatasetSnapshot& snapshot) {
  std::string out;
  json header = {{"format_version", 1},
                 {"snapshot_id", snapshot.id},
                 {"bbox", bbox_to_json(snapshot.bbox)},
                 {"created", snapshot.created}};
  out += header.dump();
  out += '\n';
  for (const auto& item : snapshot.items) {
    out += item_to_json(item).dump();
    out += '\n';
  }
  return out;
}

inline DatasetSnapshot read_snapshot(std::string_view bytes) {
  DatasetSnapshot snap;
  std::unordered_set<std::string> ids;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    auto eol = bytes.find('\n', pos);
    const auto line = bytes.substr(pos, eol == std::string_view::npos ? bytes.size() - pos
                                                                      : eol - pos);
    pos = eol == std::string_view::npos ? bytes.size() : eol + 1;
    ++line_no;
    if (detail::trim(line).empty()) continue;

    json rec;
    try {
      rec = json::parse(line.begin(), line.end());
    } catch (const json::parse_error& e) {
      throw SnapshotError(std::string("malformed record: ") + e.what(), line_no);
    }
    try {
      if (!have_header) {
        if (!rec.is_object() || rec.value("format_version", 0) != 1)
          throw FormatError("expected header with format_version 1");
        snap.id = rec.value("snapshot_id", std::string{"snapshot"});
        snap.bbox = bbox_from_json(rec.at("bbox"));
        snap.created = rec.at("created").get<std::string>();
        have_header = true;
        continue;
      }
      auto item = item_from_json(rec);
      if (!ids.insert(item.id).second) throw FormatError("duplicate item id " + item.id);
      if (!bbox_contains(snap.bbox, representative_point(item.geometry)))
        throw FormatError("item " + item.id + " lies outside the snapshot bbox");
      snap.items.push_back(std::move(item));
    } catch (const SnapshotError&) {
      throw;
    } catch (const std::exception& e) {
      throw SnapshotError(e.what(), line_no);
    }
  }
  if (!have_header) throw SnapshotError("missing header", std::max<std::size_t>(line_no, 1));
  return snap;
}

}  // namespace facetmap

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

// Visualization constraints of a map and their resolution against items.
//
// Per category: a uniform opacity, a hide flag that leaves the opacity
// untouched, and facet-value selections. Values selected within one facet
// are alternatives (OR); selections on distinct facets must all hold (AND).
// An item without a selected facet only matches through the NOT SPECIFIED
// sentinel. Projection is purely visual: items are never modified.

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "facetmap/geo.hpp"
#include "facetmap/ingestion.hpp"

namespace facetmap {

struct CategoryProjection {
  std::string category_id;
  double opacity = 1.0;
  bool hidden = false;
  // Facet key -> selected values. A present key never maps to an empty set.
  std::map<std::string, std::set<std::string>> selections;

  friend bool operator==(const CategoryProjection&, const CategoryProjection&) = default;
};

struct ProjectionState {
  std::string map_id;
  std::map<std::string, CategoryProjection> categories;
  std::vector<std::string> searched;  // side-bar order

  friend bool operator==(const ProjectionState&, const ProjectionState&) = default;
};

struct VisibilityResult {
  bool visible = false;
  double opacity = 0.0;
  std::vector<std::string> highlighted_facets;

  friend bool operator==(const VisibilityResult&, const VisibilityResult&) = default;
};

namespace detail {

inline CategoryProjection& projection_for(ProjectionState& state,
                                          const std::string& category_id) {
  auto it = state.categories.find(category_id);
  if (it == state.categories.end())
    throw NotFoundError("category '" + category_id + "' is not part of the map");
  return it->second;
}

}  // namespace detail

// Appends the category with default projection; no-op if already present.
inline ProjectionState add_category(ProjectionState state, const std::string& category_id) {
  if (state.categories.contains(category_id)) return state;
  state.categories.emplace(category_id, CategoryProjection{category_id, 1.0, false, {}});
  state.searched.push_back(category_id);
  return state;
}

inline ProjectionState remove_category(ProjectionState state, const std::string& category_id) {
  if (state.categories.erase(category_id) == 0)
    throw NotFoundError("category '" + category_id + "' is not part of the map");
  std::erase(state.searched, category_id);
  return state;
}

inline ProjectionState set_opacity(ProjectionState state, const std::string& category_id,
                                   double opacity) {
  if (!(opacity >= 0.0 && opacity <= 1.0))
    throw InvalidArgument("opacity must lie in [0, 1]");
  detail::projection_for(state, category_id).opacity = opacity;
  return state;
}

inline ProjectionState set_hidden(ProjectionState state, const std::string& category_id,
                                  bool hidden) {
  detail::projection_for(state, category_id).hidden = hidden;
  return state;
}

// Adds `value` to the facet's selection, or removes it if already selected.
inline ProjectionState toggle_value(ProjectionState state, const std::string& category_id,
                                    const std::string& facet_key, const std::string& value) {
  if (facet_key.empty() || value.empty())
    throw InvalidArgument("facet and value must be non-empty");
  auto& selections = detail::projection_for(state, category_id).selections;
  auto& values = selections[facet_key];
  if (!values.erase(value)) values.insert(value);
  if (values.empty()) selections.erase(facet_key);
  return state;
}

inline VisibilityResult item_visibility(const GeoItem& item, const ProjectionState& state) {
  auto it = state.categories.find(item.category_id);
  if (it == state.categories.end()) return {};
  const auto& proj = it->second;
  if (proj.hidden) return {false, proj.opacity, {}};

  VisibilityResult result{true, proj.opacity, {}};
  for (const auto& [facet, values] : proj.selections) {
    auto f = item.facets.find(facet);
    const std::string_view actual =
        f == item.facets.end() ? kNotSpecified : std::string_view(f->second);
    if (!values.contains(std::string(actual))) return {false, proj.opacity, {}};
    result.highlighted_facets.push_back(facet);
  }
  return result;
}

// Index into the input span plus its resolved visibility.
struct ProjectedItem {
  std::size_t index = 0;
  VisibilityResult visibility;
};

// Order-stable: visible items in input order.
inline std::vector<ProjectedItem> resolve_projection(std::span<const GeoItem> items,
                                                     const ProjectionState& state) {
  std::vector<ProjectedItem> out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto v = item_visibility(items[i], state);
    if (v.visible) out.push_back({i, std::move(v)});
  }
  return out;
}

namespace detail {

// True when p lies on segment ab (collinear and within its extent).
inline bool on_segment(const Point& p, const Point& a, const Point& b) {
  const double cross = (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon);
  if (cross != 0.0) return false;
  return p.lon >= std::min(a.lon, b.lon) && p.lon <= std::max(a.lon, b.lon) &&
         p.lat >= std::min(a.lat, b.lat) && p.lat <= std::max(a.lat, b.lat);
}

}  // namespace detail

// Even-odd ray casting; points on an edge or vertex count as inside.
inline bool point_in_polygon(const Point& p, const Polygon& polygon) {
  const auto& ring = polygon.ring;
  const std::size_t n = ring.size();
  if (n < 3) return false;
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = ring[i];
    const auto& b = ring[j];
    if (detail::on_segment(p, a, b)) return true;
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      const double x = a.lon + (p.lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
      if (p.lon < x) inside = !inside;
    }
  }
  return inside;
}

// Visible items (optionally of one category) whose representative point is
// inside `polygon`.
inline std::size_t count_in_polygon(std::span<const GeoItem> items, const ProjectionState& state,
                                    const Polygon& polygon,
                                    const std::optional<std::string>& category_id = {}) {
  std::size_t n = 0;
  for (const auto& item : items) {
    if (category_id && item.category_id != *category_id) continue;
    if (!item_visibility(item, state).visible) continue;
    if (point_in_polygon(representative_point(item.geometry), polygon)) ++n;
  }
  return n;
}

// ---------------------------------------------------------------------------
// JSON encoding

inline json to_json(const CategoryProjection& p) {
  json selections = json::object();
  for (const auto& [facet, values] : p.selections)
    selections[facet] = json(std::vector<std::string>(values.begin(), values.end()));
  return {{"category_id", p.category_id},
          {"opacity", p.opacity},
          {"hidden", p.hidden},
          {"selections", std::move(selections)}};
}

inline json to_json(const ProjectionState& s) {
  json categories = json::object();
  for (const auto& [id, p] : s.categories) categories[id] = to_json(p);
  return {{"map_id", s.map_id}, {"categories", std::move(categories)}, {"searched", s.searched}};
}

inline CategoryProjection category_projection_from_json(const json& j) {
  CategoryProjection p;
  p.category_id = j.at("category_id").get<std::string>();
  p.opacity = j.at("opacity").get<double>();
  p.hidden = j.at("hidden").get<bool>();
  if (!(p.opacity >= 0.0 && p.opacity <= 1.0)) throw FormatError("opacity out of range");
  for (const auto& [facet, values] : j.at("selections").items()) {
    auto set = values.get<std::set<std::string>>();
    if (!set.empty()) p.selections.emplace(facet, std::move(set));
  }
  return p;
}

inline ProjectionState projection_state_from_json(const json& j) {
  try {
    ProjectionState s;
    s.map_id = j.at("map_id").get<std::string>();
    for (const auto& [id, p] : j.at("categories").items())
      s.categories.emplace(id, category_projection_from_json(p));
    s.searched = j.at("searched").get<std::vector<std::string>>();
    std::set<std::string> listed(s.searched.begin(), s.searched.end());
    if (listed.size() != s.searched.size() || listed.size() != s.categories.size())
      throw FormatError("searched list does not match projected categories");
    for (const auto& id : s.searched)
      if (!s.categories.contains(id)) throw FormatError("searched category without projection");
    return s;
  } catch (const json::exception& e) {
    throw FormatError(std::string("projection state: ") + e.what());
  }
}

}  // namespace facetmap

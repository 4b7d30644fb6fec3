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

// Long-lasting map documents over registered dataset snapshots.
//
// Data directory layout:
//   <data_dir>/snapshots/<snapshot_id>.jsonl   line-delimited snapshots
//   <data_dir>/maps/<map_id>.json              one document per map
//
// Every mutation of a map runs under that map's exclusive guard and is
// written through to disk before it returns. Reads copy the document under
// the guard and compute on the copy.

#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "facetmap/analytics.hpp"
#include "facetmap/geo.hpp"
#include "facetmap/ingestion.hpp"
#include "facetmap/projection.hpp"

namespace facetmap {

enum class WidgetLayout { checkboxes, treemap, sunburst, sliders_only };

inline std::string_view to_string(WidgetLayout l) {
  switch (l) {
    case WidgetLayout::checkboxes: return "checkboxes";
    case WidgetLayout::treemap: return "treemap";
    case WidgetLayout::sunburst: return "sunburst";
    case WidgetLayout::sliders_only: return "sliders-only";
  }
  return "checkboxes";
}

inline WidgetLayout parse_layout(std::string_view s) {
  if (s == "checkboxes") return WidgetLayout::checkboxes;
  if (s == "treemap") return WidgetLayout::treemap;
  if (s == "sunburst") return WidgetLayout::sunburst;
  if (s == "sliders-only") return WidgetLayout::sliders_only;
  throw InvalidArgument("unknown widget layout '" + std::string(s) + "'");
}

struct MapDocument {
  std::string map_id;
  std::string title;
  BoundingBox bbox;
  std::string snapshot_id;
  ProjectionState projection;
  std::string created;
  std::string updated;
  WidgetLayout layout = WidgetLayout::checkboxes;
  std::uint64_t revision = 0;

  friend bool operator==(const MapDocument&, const MapDocument&) = default;
};

inline json to_json(const MapDocument& d) {
  return {{"map_id", d.map_id},           {"title", d.title},
          {"bbox", bbox_to_json(d.bbox)}, {"snapshot_id", d.snapshot_id},
          {"projection", to_json(d.projection)},
          {"created", d.created},         {"updated", d.updated},
          {"layout", to_string(d.layout)}, {"revision", d.revision}};
}

inline MapDocument map_document_from_json(const json& j) {
  try {
    MapDocument d;
    d.map_id = j.at("map_id").get<std::string>();
    d.title = j.at("title").get<std::string>();
    d.bbox = bbox_from_json(j.at("bbox"));
    d.snapshot_id = j.at("snapshot_id").get<std::string>();
    d.projection = projection_state_from_json(j.at("projection"));
    d.created = j.at("created").get<std::string>();
    d.updated = j.at("updated").get<std::string>();
    d.layout = parse_layout(j.at("layout").get<std::string>());
    d.revision = j.at("revision").get<std::uint64_t>();
    if (d.projection.map_id != d.map_id) throw FormatError("projection belongs to another map");
    return d;
  } catch (const json::exception& e) {
    throw FormatError(std::string("map document: ") + e.what());
  }
}

inline std::string serialize_map_document(const MapDocument& d) {
  return to_json(d).dump(2) + "\n";
}

struct RenderedItem {
  std::string id;
  std::string category_id;
  Geometry geometry;
  std::string color;
  std::string icon;
  double opacity = 1.0;
  std::vector<std::string> highlighted_facets;
};

inline json to_json(const RenderedItem& r) {
  return {{"id", r.id},       {"category", r.category_id},
          {"geometry", geometry_to_json(r.geometry)},
          {"color", r.color}, {"icon", r.icon},
          {"opacity", r.opacity}, {"highlighted_facets", r.highlighted_facets}};
}

struct DetailRow {
  std::string facet;
  std::string value;
  bool highlighted = false;
};

struct ItemDetails {
  std::string item_id;
  std::string category_id;
  std::vector<DetailRow> rows;
};

inline json to_json(const ItemDetails& d) {
  json rows = json::array();
  for (const auto& r : d.rows)
    rows.push_back({{"facet", r.facet}, {"value", r.value}, {"highlighted", r.highlighted}});
  return {{"id", d.item_id}, {"category", d.category_id}, {"rows", std::move(rows)}};
}

struct ValueToggle {
  std::string facet;
  std::string value;
};

// Changes applied to one category in a single atomic step. When
// `expected_revision` is set and stale the whole patch is rejected.
struct ProjectionPatch {
  std::string category_id;
  std::optional<double> opacity;
  std::optional<bool> hidden;
  std::vector<ValueToggle> toggles;
  std::optional<std::uint64_t> expected_revision;
};

inline ProjectionPatch projection_patch_from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("patch body must be an object");
  try {
    ProjectionPatch p;
    p.category_id = j.at("category_id").get<std::string>();
    if (j.contains("opacity")) p.opacity = j.at("opacity").get<double>();
    if (j.contains("hidden")) p.hidden = j.at("hidden").get<bool>();
    if (j.contains("toggles"))
      for (const auto& t : j.at("toggles"))
        p.toggles.push_back({t.at("facet").get<std::string>(), t.at("value").get<std::string>()});
    if (j.contains("revision")) p.expected_revision = j.at("revision").get<std::uint64_t>();
    return p;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("invalid projection patch: ") + e.what());
  }
}

inline ProjectionState apply_patch(ProjectionState state, const ProjectionPatch& patch) {
  if (!state.categories.contains(patch.category_id))
    throw NotFoundError("category '" + patch.category_id + "' is not part of the map");
  if (patch.opacity) state = set_opacity(std::move(state), patch.category_id, *patch.opacity);
  if (patch.hidden) state = set_hidden(std::move(state), patch.category_id, *patch.hidden);
  for (const auto& t : patch.toggles)
    state = toggle_value(std::move(state), patch.category_id, t.facet, t.value);
  return state;
}

// Ids double as file names.
inline bool is_safe_id(std::string_view id) {
  if (id.empty() || id.front() == '.') return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
  });
}

class MapService {
 public:
  struct Options {
    std::filesystem::path data_dir;  // empty: in-memory only
    RankingConfig ranking;
    NavigationQualityParams navigation;
  };

  MapService(CategoryMappingConfig config, Options options)
      : config_(std::move(config)), options_(std::move(options)) {
    validate(config_);
    validate(options_.ranking);
    if (!options_.data_dir.empty()) load();
  }

  MapService(const MapService&) = delete;
  MapService& operator=(const MapService&) = delete;

  const CategoryMappingConfig& config() const { return config_; }

  void register_snapshot(DatasetSnapshot snapshot) {
    if (!is_safe_id(snapshot.id))
      throw InvalidArgument("snapshot id must be non-empty [A-Za-z0-9._-], got '" + snapshot.id +
                            "'");
    if (persistent()) {
      std::filesystem::create_directories(snapshot_dir());
      write_file(snapshot_dir() / (snapshot.id + ".jsonl"), write_snapshot(snapshot));
    }
    std::unique_lock lock(snapshots_mu_);
    auto id = snapshot.id;
    snapshots_[id] = std::make_shared<const DatasetSnapshot>(std::move(snapshot));
  }

  std::vector<std::string> snapshot_ids() const {
    std::shared_lock lock(snapshots_mu_);
    std::vector<std::string> ids;
    for (const auto& [id, _] : snapshots_) ids.push_back(id);
    return ids;
  }

  // Case-insensitive prefix match on id or label, ordered by label.
  std::vector<Category> categories(std::string_view prefix = {}) const {
    const auto p = detail::ascii_lower(prefix);
    std::vector<Category> out;
    for (const auto& c : config_) {
      if (detail::ascii_lower(c.id).starts_with(p) || detail::ascii_lower(c.label).starts_with(p))
        out.push_back(c);
    }
    std::sort(out.begin(), out.end(), [](const Category& a, const Category& b) {
      return std::pair(a.label, a.id) < std::pair(b.label, b.id);
    });
    return out;
  }

  MapDocument create_map(std::string title, const BoundingBox& bbox,
                         const std::string& snapshot_id,
                         WidgetLayout layout = WidgetLayout::checkboxes) {
    validate(bbox);
    auto snapshot = find_snapshot(snapshot_id);
    auto entry = std::make_shared<MapEntry>();
    entry->doc.title = std::move(title);
    entry->doc.bbox = bbox;
    entry->doc.snapshot_id = snapshot_id;
    entry->doc.layout = layout;
    entry->doc.created = entry->doc.updated = utc_timestamp_now();
    entry->items = items_in_bbox(*snapshot, bbox);

    std::unique_lock lock(maps_mu_);
    std::string id;
    do {
      id = generate_id();
    } while (maps_.contains(id));
    entry->doc.map_id = id;
    entry->doc.projection.map_id = id;
    persist(entry->doc);
    maps_.emplace(id, entry);
    return entry->doc;
  }

  MapDocument get_map(const std::string& map_id) const {
    auto entry = find_map(map_id);
    std::lock_guard guard(entry->mu);
    return entry->doc;
  }

  std::string map_document_bytes(const std::string& map_id) const {
    return serialize_map_document(get_map(map_id));
  }

  // Adds the category to the side bar (idempotent) and returns its widget.
  WidgetPayload search_category(const std::string& map_id, const std::string& category_id) {
    require_category(category_id);
    auto entry = find_map(map_id);
    {
      std::lock_guard guard(entry->mu);
      if (!entry->doc.projection.categories.contains(category_id)) {
        auto doc = entry->doc;
        doc.projection = add_category(std::move(doc.projection), category_id);
        commit(*entry, std::move(doc));
      }
    }
    return payload_for(*entry, category_id);
  }

  WidgetPayload widget(const std::string& map_id, const std::string& category_id) const {
    auto entry = find_map(map_id);
    {
      std::lock_guard guard(entry->mu);
      if (!entry->doc.projection.categories.contains(category_id))
        throw NotFoundError("category '" + category_id + "' has not been searched on this map");
    }
    return payload_for(*entry, category_id);
  }

  // A re-added category goes to the end of the side bar with default projection.
  ProjectionState remove_category(const std::string& map_id, const std::string& category_id) {
    auto entry = find_map(map_id);
    std::lock_guard guard(entry->mu);
    auto doc = entry->doc;
    doc.projection = facetmap::remove_category(std::move(doc.projection), category_id);
    commit(*entry, std::move(doc));
    return entry->doc.projection;
  }

  ProjectionState update_projection(const std::string& map_id, const ProjectionPatch& patch) {
    auto entry = find_map(map_id);
    std::lock_guard guard(entry->mu);
    if (patch.expected_revision && *patch.expected_revision != entry->doc.revision)
      throw ConflictError("map " + map_id + " is at revision " +
                          std::to_string(entry->doc.revision) + "; reload and retry");
    auto doc = entry->doc;
    doc.projection = apply_patch(std::move(doc.projection), patch);
    commit(*entry, std::move(doc));
    return entry->doc.projection;
  }

  MapDocument set_layout(const std::string& map_id, WidgetLayout layout) {
    auto entry = find_map(map_id);
    std::lock_guard guard(entry->mu);
    auto doc = entry->doc;
    doc.layout = layout;
    commit(*entry, std::move(doc));
    return entry->doc;
  }

  std::vector<RenderedItem> visible_items(const std::string& map_id) const {
    auto entry = find_map(map_id);
    const auto state = projection_of(*entry);
    std::vector<RenderedItem> out;
    for (auto& p : resolve_projection(*entry->items, state)) {
      const auto& item = (*entry->items)[p.index];
      const auto* cat = find_category(item.category_id);
      out.push_back({item.id, item.category_id, item.geometry,
                     cat ? cat->color : std::string{"#808080"}, cat ? cat->icon : std::string{},
                     p.visibility.opacity, std::move(p.visibility.highlighted_facets)});
    }
    return out;
  }

  std::size_t count_items(const std::string& map_id, const std::string& category_id,
                          const Polygon& polygon) const {
    if (!is_valid(polygon)) throw InvalidArgument("polygon needs >= 3 valid vertices");
    auto entry = find_map(map_id);
    const auto state = projection_of(*entry);
    if (!state.categories.contains(category_id))
      throw NotFoundError("category '" + category_id + "' has not been searched on this map");
    return count_in_polygon(*entry->items, state, polygon, category_id);
  }

  // Display name first, then facets alphabetically. The "Name" facet is
  // folded into the first row when the item has a display name.
  ItemDetails item_details(const std::string& map_id, const std::string& item_id) const {
    auto entry = find_map(map_id);
    const auto state = projection_of(*entry);
    const auto& items = *entry->items;
    auto it = std::find_if(items.begin(), items.end(),
                           [&](const GeoItem& i) { return i.id == item_id; });
    if (it == items.end()) throw NotFoundError("unknown item '" + item_id + "'");

    const auto vis = item_visibility(*it, state);
    auto highlighted = [&](const std::string& facet) {
      return std::find(vis.highlighted_facets.begin(), vis.highlighted_facets.end(), facet) !=
             vis.highlighted_facets.end();
    };
    ItemDetails d{it->id, it->category_id, {}};
    if (it->display_name) d.rows.push_back({"Name", *it->display_name, highlighted("Name")});
    for (const auto& [facet, value] : it->facets) {
      if (it->display_name && facet == "Name") continue;
      d.rows.push_back({facet, value, highlighted(facet)});
    }
    return d;
  }

  // Rewrites every document from memory.
  void flush() const {
    if (!persistent()) return;
    std::shared_lock lock(maps_mu_);
    for (const auto& [_, entry] : maps_) {
      std::lock_guard guard(entry->mu);
      persist(entry->doc);
    }
  }

 private:
  struct MapEntry {
    mutable std::mutex mu;
    MapDocument doc;
    // Snapshot items inside the map bbox; immutable once built.
    std::shared_ptr<const std::vector<GeoItem>> items;
  };

  bool persistent() const { return !options_.data_dir.empty(); }
  std::filesystem::path snapshot_dir() const { return options_.data_dir / "snapshots"; }
  std::filesystem::path map_dir() const { return options_.data_dir / "maps"; }

  static std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static void write_file(const std::filesystem::path& path, const std::string& bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error("cannot write " + tmp.string());
      out << bytes;
      if (!out.flush()) throw Error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
  }

  void load() {
    namespace fs = std::filesystem;
    fs::create_directories(snapshot_dir());
    fs::create_directories(map_dir());
    for (const auto& f : fs::directory_iterator(snapshot_dir())) {
      if (f.path().extension() != ".jsonl") continue;
      auto snap = read_snapshot(read_file(f.path()));
      auto id = snap.id;
      snapshots_[id] = std::make_shared<const DatasetSnapshot>(std::move(snap));
    }
    for (const auto& f : fs::directory_iterator(map_dir())) {
      if (f.path().extension() != ".json") continue;
      json j;
      try {
        j = json::parse(read_file(f.path()));
      } catch (const json::parse_error& e) {
        throw ParseError(f.path().string() + ": " + e.what(), e.byte);
      }
      auto entry = std::make_shared<MapEntry>();
      entry->doc = map_document_from_json(j);
      auto snapshot = find_snapshot(entry->doc.snapshot_id);
      entry->items = items_in_bbox(*snapshot, entry->doc.bbox);
      maps_.emplace(entry->doc.map_id, std::move(entry));
    }
  }

  void persist(const MapDocument& doc) const {
    if (!persistent()) return;
    std::filesystem::create_directories(map_dir());
    write_file(map_dir() / (doc.map_id + ".json"), serialize_map_document(doc));
  }

  // Caller holds entry.mu. Disk first, so a failed write leaves memory as is.
  void commit(MapEntry& entry, MapDocument doc) const {
    doc.revision = entry.doc.revision + 1;
    doc.updated = utc_timestamp_now();
    persist(doc);
    entry.doc = std::move(doc);
  }

  static std::shared_ptr<const std::vector<GeoItem>> items_in_bbox(const DatasetSnapshot& snap,
                                                                   const BoundingBox& bbox) {
    auto items = std::make_shared<std::vector<GeoItem>>();
    for (const auto& item : snap.items)
      if (bbox_contains(bbox, representative_point(item.geometry))) items->push_back(item);
    return items;
  }

  std::shared_ptr<const DatasetSnapshot> find_snapshot(const std::string& id) const {
    std::shared_lock lock(snapshots_mu_);
    auto it = snapshots_.find(id);
    if (it == snapshots_.end()) throw NotFoundError("unknown snapshot '" + id + "'");
    return it->second;
  }

  std::shared_ptr<MapEntry> find_map(const std::string& id) const {
    std::shared_lock lock(maps_mu_);
    auto it = maps_.find(id);
    if (it == maps_.end()) throw NotFoundError("unknown map '" + id + "'");
    return it->second;
  }

  const Category* find_category(const std::string& id) const {
    for (const auto& c : config_)
      if (c.id == id) return &c;
    return nullptr;
  }

  void require_category(const std::string& id) const {
    if (!find_category(id)) throw NotFoundError("unknown category '" + id + "'");
  }

  static ProjectionState projection_of(const MapEntry& entry) {
    std::lock_guard guard(entry.mu);
    return entry.doc.projection;
  }

  WidgetPayload payload_for(const MapEntry& entry, const std::string& category_id) const {
    std::vector<GeoItem> extension;
    for (const auto& item : *entry.items)
      if (item.category_id == category_id) extension.push_back(item);
    if (extension.empty()) return WidgetPayload{category_id, {}};
    const auto ranking = rank_facets(extension, options_.ranking, options_.navigation);
    return build_widget_payload(category_id, extension, ranking, options_.ranking);
  }

  std::string generate_id() {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string id = "map-";
    for (int i = 0; i < 10; ++i) id += kHex[rng_() & 0xf];
    return id;
  }

  CategoryMappingConfig config_;
  Options options_;

  mutable std::shared_mutex snapshots_mu_;
  std::map<std::string, std::shared_ptr<const DatasetSnapshot>> snapshots_;

  mutable std::shared_mutex maps_mu_;
  std::map<std::string, std::shared_ptr<MapEntry>> maps_;
  std::mt19937_64 rng_{std::random_device{}()};  // guarded by maps_mu_
};

}  // namespace facetmap

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

// Facet statistics over a category extension.
//
// The exploration cost of a facet is its (unnormalized) base-2 entropy over
// the specified values divided by the mean number of items per value:
//
//   cost(f) = -sum_j p_j log2 p_j / meanCard(f)
//   p_j      = count_j / specified
//   meanCard = specified / m
//
// where `specified` counts the items carrying the facet and m is the number
// of distinct values. Lower is better. Facets below a coverage threshold or
// with zero cost (a single value) are never proposed.
//
// Navigation quality is the baseline metric balance * cardinality * frequency:
//
//   balance     = 1 - sum_j |count_j - specified/m| / (2 * specified)
//   cardinality = exp(-(n - mu)^2 / (2 sigma^2)),  n = m (+1 for NOT SPECIFIED)
//   frequency   = specified / |E_C|

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "facetmap/geo.hpp"

namespace facetmap {

struct ValueHistogram {
  std::string facet_key;
  std::map<std::string, std::size_t> counts;  // never holds NOT SPECIFIED
  std::size_t specified_count = 0;
  std::size_t category_total = 0;

  std::size_t value_count() const { return counts.size(); }
  std::size_t not_specified_count() const { return category_total - specified_count; }
  double coverage() const {
    return category_total == 0 ? 0.0
                               : static_cast<double>(specified_count) /
                                     static_cast<double>(category_total);
  }

  friend bool operator==(const ValueHistogram&, const ValueHistogram&) = default;
};

// Synthesizes a histogram from raw counts; `category_total` defaults to the sum.
inline ValueHistogram make_histogram(std::string facet_key,
                                     const std::map<std::string, std::size_t>& counts,
                                     std::optional<std::size_t> category_total = {}) {
  ValueHistogram h{std::move(facet_key), {}, 0, 0};
  for (const auto& [v, c] : counts) {
    if (c == 0) continue;
    h.counts.emplace(v, c);
    h.specified_count += c;
  }
  h.category_total = category_total.value_or(h.specified_count);
  if (h.category_total < h.specified_count)
    throw InvalidArgument("category_total smaller than specified count");
  return h;
}

struct NavigationQualityParams {
  double mu = 2.0;
  double sigma = 4.9;
  bool count_not_specified_as_value = true;
};

struct RankingConfig {
  double min_coverage = 0.03;
  std::size_t max_facets = 12;
  std::size_t max_values_shown = 8;
};

inline void validate(const NavigationQualityParams& p) {
  if (!(p.sigma > 0.0) || !std::isfinite(p.sigma) || !std::isfinite(p.mu))
    throw InvalidArgument("sigma must be a positive finite number");
}

inline void validate(const RankingConfig& c) {
  if (!(c.min_coverage >= 0.0 && c.min_coverage <= 1.0))
    throw InvalidArgument("min_coverage must lie in [0, 1]");
  if (c.max_facets < 1) throw InvalidArgument("max_facets must be >= 1");
}

struct FacetStats {
  std::string facet_key;
  std::size_t specified_count = 0;
  std::size_t value_count = 0;
  double coverage = 0.0;
  double entropy_bits = 0.0;
  std::optional<double> mean_cardinality;  // nullopt: facet unusable (m = 0)
  std::optional<double> exploration_cost;
  double balance = 0.0;
  double cardinality_metric = 0.0;
  double frequency = 0.0;
  double navigation_quality = 0.0;
};

// Histogram of `facet_key` over items of one category.
inline ValueHistogram build_histogram(std::span<const GeoItem> items,
                                      const std::string& facet_key) {
  ValueHistogram h{facet_key, {}, 0, items.size()};
  for (const auto& item : items) {
    auto it = item.facets.find(facet_key);
    if (it == item.facets.end()) continue;
    ++h.counts[it->second];
    ++h.specified_count;
  }
  return h;
}

inline std::vector<std::string> facet_keys(std::span<const GeoItem> items) {
  std::set<std::string> keys;
  for (const auto& item : items)
    for (const auto& [k, _] : item.facets) keys.insert(k);
  return {keys.begin(), keys.end()};
}

inline double entropy_bits(const ValueHistogram& h) {
  if (h.specified_count == 0 || h.counts.size() <= 1) return 0.0;
  const auto total = static_cast<double>(h.specified_count);
  double e = 0.0;
  for (const auto& [_, c] : h.counts) {
    const double p = static_cast<double>(c) / total;
    e -= p * std::log2(p);
  }
  // Rounding can leave a tiny negative residue for near-degenerate inputs.
  return std::max(e, 0.0);
}

// Items per distinct value, over the items where the facet is specified.
inline std::optional<double> mean_cardinality(const ValueHistogram& h) {
  if (h.counts.empty()) return std::nullopt;
  return static_cast<double>(h.specified_count) / static_cast<double>(h.counts.size());
}

inline std::optional<double> exploration_cost(const ValueHistogram& h) {
  auto mc = mean_cardinality(h);
  if (!mc) return std::nullopt;
  return entropy_bits(h) / *mc;
}

inline double balance(const ValueHistogram& h) {
  if (h.counts.empty()) return 0.0;
  const auto total = static_cast<double>(h.specified_count);
  const double mean = total / static_cast<double>(h.counts.size());
  double deviation = 0.0;
  for (const auto& [_, c] : h.counts) deviation += std::abs(static_cast<double>(c) - mean);
  return std::clamp(1.0 - deviation / (2.0 * total), 0.0, 1.0);
}

inline double cardinality_metric(const ValueHistogram& h, const NavigationQualityParams& p) {
  auto n = static_cast<double>(h.counts.size());
  if (p.count_not_specified_as_value && h.specified_count < h.category_total) n += 1.0;
  const double d = n - p.mu;
  return std::exp(-(d * d) / (2.0 * p.sigma * p.sigma));
}

inline double navigation_quality(const ValueHistogram& h,
                                 const NavigationQualityParams& params = {}) {
  validate(params);
  return balance(h) * cardinality_metric(h, params) * h.coverage();
}

inline FacetStats compute_stats(const ValueHistogram& h,
                                const NavigationQualityParams& params = {}) {
  validate(params);
  FacetStats s;
  s.facet_key = h.facet_key;
  s.specified_count = h.specified_count;
  s.value_count = h.counts.size();
  s.coverage = h.coverage();
  s.entropy_bits = entropy_bits(h);
  s.mean_cardinality = mean_cardinality(h);
  s.exploration_cost = exploration_cost(h);
  s.balance = balance(h);
  s.cardinality_metric = cardinality_metric(h, params);
  s.frequency = h.coverage();
  s.navigation_quality = s.balance * s.cardinality_metric * s.frequency;
  return s;
}

// Drops facets under the coverage threshold and facets with zero cost, then
// orders by cost ascending (ties: coverage descending, key ascending) and
// keeps at most `max_facets`.
inline std::vector<FacetStats> rank_histograms(std::span<const ValueHistogram> histograms,
                                               const RankingConfig& cfg = {},
                                               const NavigationQualityParams& params = {}) {
  validate(cfg);
  std::vector<FacetStats> ranked;
  for (const auto& h : histograms) {
    if (h.coverage() < cfg.min_coverage) continue;
    auto s = compute_stats(h, params);
    if (!s.exploration_cost || *s.exploration_cost <= 0.0) continue;
    ranked.push_back(std::move(s));
  }
  std::sort(ranked.begin(), ranked.end(), [](const FacetStats& a, const FacetStats& b) {
    if (*a.exploration_cost != *b.exploration_cost)
      return *a.exploration_cost < *b.exploration_cost;
    if (a.coverage != b.coverage) return a.coverage > b.coverage;
    return a.facet_key < b.facet_key;
  });
  if (ranked.size() > cfg.max_facets) ranked.resize(cfg.max_facets);
  return ranked;
}

inline std::vector<ValueHistogram> build_histograms(std::span<const GeoItem> items) {
  std::vector<ValueHistogram> out;
  for (const auto& key : facet_keys(items)) out.push_back(build_histogram(items, key));
  return out;
}

inline std::vector<FacetStats> rank_facets(std::span<const GeoItem> items,
                                           const RankingConfig& cfg = {},
                                           const NavigationQualityParams& params = {}) {
  const auto histograms = build_histograms(items);
  return rank_histograms(histograms, cfg, params);
}

// ---------------------------------------------------------------------------
// Widget payloads

struct ValueEntry {
  std::string value;
  std::size_t count = 0;

  friend bool operator==(const ValueEntry&, const ValueEntry&) = default;
};

struct FacetEntry {
  std::string facet_key;
  std::vector<ValueEntry> values;
  std::vector<ValueEntry> hidden_tail;
  std::size_t not_specified_count = 0;

  friend bool operator==(const FacetEntry&, const FacetEntry&) = default;
};

struct WidgetPayload {
  std::string category_id;
  std::vector<FacetEntry> facets;

  friend bool operator==(const WidgetPayload&, const WidgetPayload&) = default;
};

// Count descending, ties by value ascending. Zero counts never appear.
inline std::vector<ValueEntry> sorted_values(const ValueHistogram& h) {
  std::vector<ValueEntry> out;
  out.reserve(h.counts.size());
  for (const auto& [v, c] : h.counts)
    if (c > 0) out.push_back({v, c});
  std::stable_sort(out.begin(), out.end(), [](const ValueEntry& a, const ValueEntry& b) {
    return a.count > b.count;
  });
  return out;
}

inline WidgetPayload build_widget_payload(const std::string& category_id,
                                          std::span<const GeoItem> items,
                                          std::span<const FacetStats> ranking,
                                          const RankingConfig& cfg = {}) {
  WidgetPayload payload{category_id, {}};
  for (const auto& stats : ranking) {
    const auto h = build_histogram(items, stats.facet_key);
    auto values = sorted_values(h);
    FacetEntry entry{stats.facet_key, {}, {}, h.not_specified_count()};
    const auto shown = std::min(values.size(), cfg.max_values_shown);
    entry.values.assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(shown));
    entry.hidden_tail.assign(values.begin() + static_cast<std::ptrdiff_t>(shown), values.end());
    payload.facets.push_back(std::move(entry));
  }
  return payload;
}

inline json to_json(const WidgetPayload& p) {
  auto entries = [](const std::vector<ValueEntry>& v) {
    json a = json::array();
    for (const auto& e : v) a.push_back({{"value", e.value}, {"count", e.count}});
    return a;
  };
  json facets = json::array();
  for (const auto& f : p.facets)
    facets.push_back({{"facet", f.facet_key},
                      {"values", entries(f.values)},
                      {"hidden_tail", entries(f.hidden_tail)},
                      {"not_specified_count", f.not_specified_count}});
  return {{"category_id", p.category_id}, {"facets", std::move(facets)}};
}

// ---------------------------------------------------------------------------
// Report tables

enum class ReportFormat { markdown, csv };

namespace detail {

// Fixed four decimals; tiny non-zero values switch to scientific notation so
// underflowing qualities stay visible.
inline std::string format_number(double v) {
  char buf[64];
  if (v != 0.0 && std::abs(v) < 5e-5)
    std::snprintf(buf, sizeof buf, "%.2E", v);
  else
    std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

inline std::string format_optional(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string{"n/a"};
}

inline std::string render_table(const std::vector<std::string>& header,
                                const std::vector<std::vector<std::string>>& rows,
                                ReportFormat format) {
  std::string out;
  auto csv_field = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  auto emit = [&](const std::vector<std::string>& cells) {
    if (format == ReportFormat::csv) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += csv_field(cells[i]);
      }
    } else {
      out += '|';
      for (const auto& c : cells) out += ' ' + c + " |";
    }
    out += '\n';
  };
  emit(header);
  if (format == ReportFormat::markdown) {
    out += '|';
    for (std::size_t i = 0; i < header.size(); ++i) out += i == 0 ? "---|" : "---:|";
    out += '\n';
  }
  for (const auto& r : rows) emit(r);
  return out;
}

}  // namespace detail

// Columns: facet, coverage, entropy, meanCard, explorationCost, balance,
// cardinalityMetric, frequency, navigationQuality.
inline std::string format_stats_report(std::span<const FacetStats> stats,
                                       ReportFormat format = ReportFormat::markdown) {
  using detail::format_number;
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : stats)
    rows.push_back({s.facet_key, format_number(s.coverage), format_number(s.entropy_bits),
                    detail::format_optional(s.mean_cardinality),
                    detail::format_optional(s.exploration_cost), format_number(s.balance),
                    format_number(s.cardinality_metric), format_number(s.frequency),
                    format_number(s.navigation_quality)});
  return detail::render_table({"facet", "coverage", "entropy", "meanCard", "explorationCost",
                               "balance", "cardinalityMetric", "frequency",
                               "navigationQuality"},
                              rows, format);
}

// Exploration cost next to navigation quality and its complement.
inline std::string format_metric_comparison(std::span<const FacetStats> stats,
                                            ReportFormat format = ReportFormat::markdown) {
  using detail::format_number;
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : stats)
    rows.push_back({s.facet_key, detail::format_optional(s.exploration_cost),
                    format_number(s.navigation_quality),
                    format_number(1.0 - s.navigation_quality)});
  return detail::render_table(
      {"facet", "explorationCost", "navigationQuality", "complementNavigationQuality"}, rows,
      format);
}

}  // namespace facetmap

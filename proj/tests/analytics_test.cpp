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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "support/test_support.hpp"

namespace facetmap {
namespace {

using testing::restaurant_snapshot;

ValueHistogram fixture_histogram(const std::string& facet) {
  return build_histogram(restaurant_snapshot().items, facet);
}

std::vector<std::size_t> counts_of(const ValueHistogram& h) {
  std::vector<std::size_t> v;
  for (const auto& [_, c] : h.counts) v.push_back(c);
  return v;
}

// 8 balanced values of 20 (Ex1) or 3 (Ex2) items, in a 719-item extension.
ValueHistogram balanced_toy(std::size_t per_value) {
  std::map<std::string, std::size_t> counts;
  for (int i = 0; i < 8; ++i) counts[testing::value_name(i)] = per_value;
  return make_histogram("Ex", counts, 719);
}

TEST(BuildHistogram, FixtureTables) {
  const auto outdoor = fixture_histogram("Outdoor Seating");
  EXPECT_EQ(outdoor.counts, (std::map<std::string, std::size_t>{{"NO", 59}, {"YES", 33}}));
  EXPECT_EQ(outdoor.specified_count, 92u);
  EXPECT_EQ(outdoor.category_total, 719u);

  const auto takeaway = fixture_histogram("Takeaway");
  EXPECT_EQ(takeaway.counts,
            (std::map<std::string, std::size_t>{{"YES", 62}, {"NO", 10}, {"ONLY", 4}}));
  EXPECT_EQ(takeaway.specified_count, 76u);

  const auto cuisine = fixture_histogram("Cuisine");
  EXPECT_EQ(cuisine.specified_count, 432u);
  EXPECT_EQ(cuisine.value_count(), 86u);
  EXPECT_EQ(cuisine.counts.at("ITALIAN; PIZZA"), 15u);
  EXPECT_EQ(cuisine.counts.at("PIZZA; ITALIAN"), 10u);
  EXPECT_EQ(cuisine.not_specified_count(), 287u);

  const auto name = fixture_histogram("Name");
  EXPECT_EQ(name.specified_count, 675u);
  EXPECT_EQ(name.value_count(), 675u);
}

TEST(BuildHistogram, AbsentFacet) {
  const auto h = fixture_histogram("Bogus");
  EXPECT_TRUE(h.counts.empty());
  EXPECT_EQ(h.specified_count, 0u);
  EXPECT_EQ(h.category_total, 719u);
  EXPECT_EQ(mean_cardinality(h), std::nullopt);
  EXPECT_EQ(exploration_cost(h), std::nullopt);
}

TEST(EntropyBits, FixtureValues) {
  EXPECT_NEAR(entropy_bits(fixture_histogram("Outdoor Seating")), 0.9416, 1e-3);
  EXPECT_NEAR(entropy_bits(fixture_histogram("Takeaway")), 0.8482, 1e-3);
  EXPECT_NEAR(entropy_bits(fixture_histogram("Cuisine")), 4.3895, 1e-3);
  EXPECT_NEAR(entropy_bits(fixture_histogram("Name")), 9.3987, 1e-3);
}

TEST(EntropyBits, SingleValueIsZero) {
  EXPECT_EQ(entropy_bits(make_histogram("F", {{"A", 42}})), 0.0);
  EXPECT_EQ(entropy_bits(make_histogram("F", {})), 0.0);
}

TEST(MeanCardinality, FixtureValues) {
  EXPECT_DOUBLE_EQ(*mean_cardinality(fixture_histogram("Outdoor Seating")), 46.0);
  EXPECT_NEAR(*mean_cardinality(fixture_histogram("Takeaway")), 25.3333, 1e-4);
  EXPECT_NEAR(*mean_cardinality(fixture_histogram("Cuisine")), 5.0233, 1e-4);
  EXPECT_DOUBLE_EQ(*mean_cardinality(fixture_histogram("Name")), 1.0);
}

TEST(ExplorationCost, FixtureAndToyValues) {
  EXPECT_NEAR(*exploration_cost(fixture_histogram("Outdoor Seating")), 0.0205, 1e-3);
  EXPECT_NEAR(*exploration_cost(fixture_histogram("Takeaway")), 0.0335, 1e-3);
  EXPECT_NEAR(*exploration_cost(fixture_histogram("Cuisine")), 0.8738, 1e-3);
  EXPECT_NEAR(*exploration_cost(fixture_histogram("Name")), 9.3987, 1e-3);
  EXPECT_NEAR(*exploration_cost(balanced_toy(20)), 0.15, 1e-6);
  EXPECT_NEAR(*exploration_cost(balanced_toy(3)), 1.0, 1e-6);
}

TEST(NavigationQuality, FixtureComponents) {
  const NavigationQualityParams p;
  const auto outdoor = fixture_histogram("Outdoor Seating");
  EXPECT_NEAR(balance(outdoor), 0.8587, 1e-4);
  EXPECT_NEAR(cardinality_metric(outdoor, p), 0.9794, 1e-4);
  EXPECT_NEAR(outdoor.coverage(), 0.1280, 1e-4);
  EXPECT_NEAR(navigation_quality(outdoor, p), 0.1076, 2e-3);

  const auto takeaway = fixture_histogram("Takeaway");
  EXPECT_NEAR(balance(takeaway), 0.5175, 1e-4);
  EXPECT_NEAR(cardinality_metric(takeaway, p), 0.9201, 1e-4);
  EXPECT_NEAR(navigation_quality(takeaway, p), 0.0503, 2e-3);

  const auto cuisine = fixture_histogram("Cuisine");
  EXPECT_NEAR(balance(cuisine), 0.3663, 1e-3);
  const double card = cardinality_metric(cuisine, p);
  EXPECT_NEAR(std::log10(card), std::log10(4.54e-66), 0.01);
  EXPECT_NEAR(std::log10(navigation_quality(cuisine, p)), std::log10(9.99e-67), 0.01);

  const auto name = fixture_histogram("Name");
  EXPECT_DOUBLE_EQ(balance(name), 1.0);
  EXPECT_NEAR(name.coverage(), 0.9388, 1e-4);
  EXPECT_LE(navigation_quality(name, p), 1e-6);
}

// Toy facets only match the published cardinality metric when NOT SPECIFIED
// is not counted as a value.
TEST(NavigationQuality, ToyFacetsWithoutSentinelValue) {
  const NavigationQualityParams p{2.0, 4.9, false};
  EXPECT_NEAR(cardinality_metric(balanced_toy(20), p), 0.4725, 1e-4);
  EXPECT_NEAR(navigation_quality(balanced_toy(20), p), 0.1051, 1e-3);
  EXPECT_NEAR(navigation_quality(balanced_toy(3), p), 0.0157, 1e-3);
}

TEST(NavigationQuality, RejectsNonPositiveSigma) {
  EXPECT_THROW(navigation_quality(balanced_toy(3), {2.0, 0.0, true}), InvalidArgument);
}

TEST(EntropyProperty, BoundsAgainstDirectSummation) {
  std::mt19937 rng(101);
  for (int i = 0; i < 400; ++i) {
    auto h = testing::random_histogram(rng);
    if (i % 5 == 0) {
      // Force a balanced histogram now and then.
      for (auto& [_, c] : h.counts) c = 7;
      h = make_histogram("F", h.counts, 7 * h.counts.size());
    }
    const double e = entropy_bits(h);
    const double m = static_cast<double>(h.value_count());
    EXPECT_NEAR(e, oracle::entropy(counts_of(h)), 1e-9);
    EXPECT_GE(e, 0.0);
    EXPECT_LE(e, std::log2(m) + 1e-9);
    const auto cs = counts_of(h);
    const bool all_equal = std::all_of(cs.begin(), cs.end(), [&](auto c) { return c == cs[0]; });
    EXPECT_EQ(std::abs(e - std::log2(m)) < 1e-9, all_equal);
  }
}

TEST(BalanceProperty, BoundsAndEquality) {
  std::mt19937 rng(202);
  for (int i = 0; i < 400; ++i) {
    auto h = testing::random_histogram(rng, i % 7 == 0 ? 1 : 12);
    const double b = balance(h);
    const auto cs = counts_of(h);
    EXPECT_NEAR(b, oracle::balance(cs), 1e-12);
    EXPECT_GE(b, 0.0);
    EXPECT_LE(b, 1.0);
    const bool all_equal = std::all_of(cs.begin(), cs.end(), [&](auto c) { return c == cs[0]; });
    EXPECT_EQ(b == 1.0, all_equal);
  }
}

TEST(BalanceProperty, GoldenValuesFromExcessRoute) {
  EXPECT_NEAR(oracle::balance({59, 33}), 0.8587, 1e-4);
  EXPECT_NEAR(oracle::balance({62, 10, 4}), 0.5175, 1e-4);
  EXPECT_NEAR(oracle::balance(counts_of(fixture_histogram("Cuisine"))), 0.3663, 1e-4);
}

TEST(ExplorationCostProperty, ScalingCountsDividesCostByK) {
  std::mt19937 rng(303);
  for (int i = 0; i < 200; ++i) {
    const auto h = testing::random_histogram(rng);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(2, 9)(rng);
    std::map<std::string, std::size_t> scaled;
    for (const auto& [v, c] : h.counts) scaled[v] = c * k;
    const auto hk = make_histogram("F", scaled, h.category_total * k);
    EXPECT_NEAR(entropy_bits(hk), entropy_bits(h), 1e-9);
    EXPECT_NEAR(*mean_cardinality(hk), *mean_cardinality(h) * static_cast<double>(k), 1e-9);
    EXPECT_NEAR(*exploration_cost(hk), *exploration_cost(h) / static_cast<double>(k), 1e-9);
    EXPECT_NEAR(hk.coverage(), h.coverage(), 1e-12);
  }
}

std::vector<GeoItem> fixture_restricted(const std::set<std::string>& keep) {
  auto items = restaurant_snapshot().items;
  for (auto& item : items)
    std::erase_if(item.facets, [&](const auto& kv) { return !keep.contains(kv.first); });
  return items;
}

TEST(RankFacets, FixtureOrder) {
  const auto ranked = rank_facets(restaurant_snapshot().items);
  std::vector<std::string> keys;
  for (const auto& s : ranked) keys.push_back(s.facet_key);
  EXPECT_EQ(keys, (std::vector<std::string>{"Outdoor Seating", "Takeaway", "Cuisine", "Name"}));
}

TEST(RankFacets, CoverageThresholdAndZeroCost) {
  auto items = fixture_restricted({"Takeaway"});
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i < 10) items[i].facets["Rare"] = i % 2 ? "A" : "B";  // 1.4% coverage
    items[i].facets["Constant"] = "PRIMARY";
  }
  const auto ranked = rank_facets(items);
  ASSERT_EQ(ranked.size(), 1u);
  EXPECT_EQ(ranked[0].facet_key, "Takeaway");
}

TEST(RankFacets, CoverageBoundaryIsInclusive) {
  std::vector<GeoItem> items;
  for (int i = 0; i < 100; ++i) {
    GeoItem item{"i" + std::to_string(i), "c", Point{0, 0}, {}, {}};
    if (i < 3) item.facets["Exact"] = i % 2 ? "A" : "B";  // exactly 3%
    if (i < 2) item.facets["Below"] = i % 2 ? "A" : "B";
    items.push_back(item);
  }
  const auto ranked = rank_facets(items);
  ASSERT_EQ(ranked.size(), 1u);
  EXPECT_EQ(ranked[0].facet_key, "Exact");
}

TEST(RankFacets, CapAndDeterministicTies) {
  std::vector<GeoItem> items;
  for (int i = 0; i < 60; ++i) {
    GeoItem item{"i" + std::to_string(i), "c", Point{0, 0}, {}, {}};
    for (int f = 0; f < 15; ++f) item.facets[testing::facet_name(f)] = i % 2 ? "X" : "Y";
    items.push_back(item);
  }
  const auto ranked = rank_facets(items);
  ASSERT_EQ(ranked.size(), 12u);
  // All costs tie; key order decides.
  EXPECT_EQ(ranked[0].facet_key, "F0");
  EXPECT_EQ(ranked[1].facet_key, "F1");
  EXPECT_EQ(ranked[2].facet_key, "F10");
  const auto again = rank_facets(items);
  EXPECT_EQ(format_stats_report(again), format_stats_report(ranked));
}

TEST(RankFacets, OutputIsOrderedSubsetOfInput) {
  std::mt19937 rng(404);
  for (int round = 0; round < 100; ++round) {
    auto world = testing::random_world(rng);
    if (world.items.empty()) continue;
    const auto keys = facet_keys(world.items);
    const auto ranked = rank_facets(world.items);
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      EXPECT_TRUE(std::binary_search(keys.begin(), keys.end(), ranked[i].facet_key));
      EXPECT_GT(*ranked[i].exploration_cost, 0.0);
      EXPECT_GE(ranked[i].coverage, 0.03);
      if (i) {
        EXPECT_LE(*ranked[i - 1].exploration_cost, *ranked[i].exploration_cost);
      }
    }
  }
}

TEST(WidgetPayload, CuisineTruncation) {
  const auto& items = restaurant_snapshot().items;
  const auto ranked = rank_facets(items);
  const auto payload = build_widget_payload("restaurants", items, ranked);
  const auto it = std::find_if(payload.facets.begin(), payload.facets.end(),
                               [](const FacetEntry& f) { return f.facet_key == "Cuisine"; });
  ASSERT_NE(it, payload.facets.end());
  const std::vector<ValueEntry> expected{{"PIZZA", 111},         {"ITALIAN", 74},
                                         {"REGIONAL", 37},       {"CHINESE", 28},
                                         {"JAPANESE", 17},       {"ITALIAN; PIZZA", 15},
                                         {"SUSHI", 11},          {"ITALIAN; REGIONAL", 10}};
  EXPECT_EQ(it->values, expected);
  ASSERT_EQ(it->hidden_tail.size(), 78u);
  EXPECT_EQ(it->hidden_tail[0], (ValueEntry{"PIZZA; ITALIAN", 10}));
  EXPECT_EQ(it->hidden_tail[1], (ValueEntry{"MEXICAN", 9}));
  EXPECT_EQ(it->not_specified_count, 287u);
}

TEST(WidgetPayload, TakeawayAndExactFit) {
  const auto& items = restaurant_snapshot().items;
  const auto ranked = rank_facets(items);
  RankingConfig cfg;
  const auto payload = build_widget_payload("restaurants", items, ranked, cfg);
  ASSERT_GE(payload.facets.size(), 2u);
  EXPECT_EQ(payload.facets[0].facet_key, "Outdoor Seating");
  const auto& takeaway = payload.facets[1];
  EXPECT_EQ(takeaway.values,
            (std::vector<ValueEntry>{{"YES", 62}, {"NO", 10}, {"ONLY", 4}}));
  EXPECT_TRUE(takeaway.hidden_tail.empty());
  EXPECT_EQ(takeaway.not_specified_count, 643u);

  cfg.max_values_shown = 3;
  const auto exact = build_widget_payload("restaurants", items, ranked, cfg);
  EXPECT_EQ(exact.facets[1].values.size(), 3u);
  EXPECT_TRUE(exact.facets[1].hidden_tail.empty());
}

TEST(WidgetPayload, OrderingAndNoZeroCounts) {
  std::mt19937 rng(505);
  for (int round = 0; round < 100; ++round) {
    auto world = testing::random_world(rng);
    if (world.items.empty()) continue;
    RankingConfig cfg;
    cfg.max_values_shown = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
    const auto ranked = rank_facets(world.items, cfg);
    const auto payload = build_widget_payload("x", world.items, ranked, cfg);
    for (const auto& f : payload.facets) {
      auto all = f.values;
      all.insert(all.end(), f.hidden_tail.begin(), f.hidden_tail.end());
      std::size_t sum = f.not_specified_count;
      for (std::size_t i = 0; i < all.size(); ++i) {
        EXPECT_GE(all[i].count, 1u);
        sum += all[i].count;
        if (i) {
          const auto& a = all[i - 1];
          const auto& b = all[i];
          EXPECT_TRUE(a.count > b.count || (a.count == b.count && a.value < b.value));
        }
      }
      EXPECT_EQ(sum, world.items.size());
      EXPECT_LE(f.values.size(), cfg.max_values_shown);
    }
  }
}

TEST(Report, ColumnsAndFormats) {
  const auto ranked = rank_facets(restaurant_snapshot().items);
  const auto md = format_stats_report(ranked);
  EXPECT_EQ(md.substr(0, md.find('\n')),
            "| facet | coverage | entropy | meanCard | explorationCost | balance | "
            "cardinalityMetric | frequency | navigationQuality |");
  EXPECT_NE(md.find("| Outdoor Seating | 0.1280 | 0.9416 | 46.0000 | 0.0205 | 0.8587 | "
                    "0.9794 | 0.1280 | 0.1076 |"),
            std::string::npos);
  const auto csv = format_stats_report(ranked, ReportFormat::csv);
  EXPECT_NE(csv.find("Cuisine,0.6008,4.3895,5.0233,0.8738,0.3663,4.54E-66,0.6008,9.99E-67"),
            std::string::npos);
  const auto cmp = format_metric_comparison(ranked, ReportFormat::csv);
  EXPECT_NE(cmp.find("Outdoor Seating,0.0205,0.1076,0.8924"), std::string::npos);
}

}  // namespace
}  // namespace facetmap

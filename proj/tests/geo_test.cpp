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

#include <random>

#include <gtest/gtest.h>

#include "support/test_support.hpp"

namespace facetmap {
namespace {

TEST(RepresentativePoint, PointIsIdentity) {
  EXPECT_EQ(representative_point(Point{7.68, 45.07}), (Point{7.68, 45.07}));
}

TEST(RepresentativePoint, SquareCenter) {
  Polygon sq{{{0, 0}, {2, 0}, {2, 2}, {0, 2}}};
  EXPECT_EQ(representative_point(sq), (Point{1, 1}));
}

TEST(RepresentativePoint, TriangleVertexMean) {
  Polygon tri{{{0, 0}, {3, 0}, {0, 3}}};
  EXPECT_EQ(representative_point(tri), (Point{1, 1}));
}

TEST(RepresentativePoint, RandomAxisAlignedSquaresGiveTheirCenter) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> lon(-170, 170), lat(-80, 80), side(1e-4, 5);
  for (int i = 0; i < 200; ++i) {
    const double x = lon(rng), y = lat(rng), s = side(rng);
    Polygon sq{{{x, y}, {x + s, y}, {x + s, y + s}, {x, y + s}}};
    const auto c = representative_point(sq);
    EXPECT_NEAR(c.lon, x + s / 2, 1e-9);
    EXPECT_NEAR(c.lat, y + s / 2, 1e-9);
  }
}

TEST(BBoxContains, InsideBoundaryOutside) {
  const BoundingBox b{0, 0, 1, 1};
  EXPECT_TRUE(bbox_contains(b, {0.5, 0.5}));
  EXPECT_TRUE(bbox_contains(b, {1, 1}));
  EXPECT_TRUE(bbox_contains(b, {0, 0}));
  EXPECT_FALSE(bbox_contains(b, {1.0001, 0.5}));
  EXPECT_FALSE(bbox_contains(b, {0.5, -0.0001}));
}

TEST(Validation, Geometry) {
  EXPECT_TRUE(is_valid(Geometry{Point{180, -90}}));
  EXPECT_FALSE(is_valid(Geometry{Point{180.5, 0}}));
  EXPECT_FALSE(is_valid(Geometry{Point{0, std::nan("")}}));
  EXPECT_FALSE(is_valid(Geometry{Polygon{{{0, 0}, {1, 1}}}}));
}

TEST(Validation, BoundingBox) {
  EXPECT_NO_THROW(validate(BoundingBox{0, 0, 1, 1}));
  EXPECT_THROW(validate(BoundingBox{1, 0, 0, 1}), InvalidArgument);
  // Antimeridian-crossing boxes (west > east) are rejected.
  EXPECT_THROW(validate(BoundingBox{0, 170, 1, -170}), InvalidArgument);
}

TEST(Validation, CategoryColorAndPredicate) {
  Category c{"restaurants", "Restaurants", "#E4572E", "restaurant", {"amenity", "restaurant"}};
  EXPECT_NO_THROW(validate(c));
  EXPECT_EQ(parse_hex_color("#E4572E"), (Rgb{0xE4, 0x57, 0x2E}));
  c.color = "E4572E";
  EXPECT_THROW(validate(c), InvalidArgument);
  c.color = "#GG0000";
  EXPECT_THROW(validate(c), InvalidArgument);
  c.color = "#000000";
  c.tag_predicate.value.clear();
  EXPECT_THROW(validate(c), InvalidArgument);
}

TEST(ItemJson, RoundTripPreservesEveryField) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> coord(-80, 80);
  for (int i = 0; i < 200; ++i) {
    GeoItem item{"node/" + std::to_string(i), "c", Point{coord(rng), coord(rng)}, {}, {}};
    if (i % 2) {
      Polygon p;
      for (int k = 0; k < 3 + i % 5; ++k) p.ring.push_back({coord(rng), coord(rng)});
      item.geometry = p;
    }
    if (i % 3) item.display_name = "Caffè \"n°" + std::to_string(i) + "\"";
    item.facets["Cuisine"] = "ITALIAN; PIZZA";
    item.facets["Addr City"] = "TORINO";
    const auto back = item_from_json(json::parse(item_to_json(item).dump()));
    EXPECT_EQ(back, item);
  }
}

TEST(ItemJson, RejectsBadGeometry) {
  auto j = json::parse(R"({"id":"x","category":"c","geom":{"type":"line","coords":[]}})");
  EXPECT_THROW(item_from_json(j), FormatError);
  j = json::parse(R"({"id":"x","category":"c","geom":{"type":"point","coords":[200,0]}})");
  EXPECT_THROW(item_from_json(j), FormatError);
}

}  // namespace
}  // namespace facetmap

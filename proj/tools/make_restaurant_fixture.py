#!/usr/bin/env python3
# Copyright 2026 The Facetmap Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the Torino restaurant fixture used by the test suites.

The 719 restaurants inside the Torino bounding box carry exactly these
value distributions:

  cuisine          432 items, 86 distinct values (30 listed + 56 singletons)
  outdoor_seating   92 items, no:59 yes:33
  takeaway          76 items, yes:62 no:10 only:4
  name             675 items, all distinct

A few extra elements exercise the ingestion filters (uncategorized,
outside the bbox, missing coordinates). The output is deterministic.
"""

import json
import random
import sys

BBOX = (45.0067, 7.5778, 45.1402, 7.7733)  # south, west, north, east

CUISINE = [
    ("pizza", 111), ("italian", 74), ("regional", 37), ("chinese", 28),
    ("japanese", 17), ("italian; pizza", 15), ("sushi", 11),
    ("italian; regional", 10), ("pizza; italian", 10), ("mexican", 9),
    ("kebab", 7), ("indian", 4), ("asian", 3), ("chinese; japanese", 3),
    ("fish", 3), ("international", 3), ("italian; pizza; regional", 3),
    ("italian_pizza", 3), ("peruvian", 3), ("steak_house", 3),
    ("american", 2), ("chinese; pizza", 2), ("greek", 2),
    ("italian_pizza; pizza", 2), ("kebab; pizza", 2), ("local", 2),
    ("mediterranean", 2), ("pizza; kebab", 2), ("regional; italian", 2),
    ("african", 1),
]

SINGLETONS = [
    "argentinian", "brazilian", "burger", "cajun", "caribbean", "chicken",
    "colombian", "crepe", "cuban", "eritrean", "ethiopian", "filipino",
    "french", "fusion", "georgian", "german", "hawaiian", "hungarian",
    "indonesian", "iranian", "irish", "israeli", "korean", "lebanese",
    "malaysian", "moroccan", "nepalese", "pakistani", "persian", "polish",
    "portuguese", "ramen", "romanian", "russian", "sardinian", "senegalese",
    "sicilian", "spanish", "sri_lankan", "syrian", "tapas", "thai",
    "tibetan", "turkish", "tuscan", "ukrainian", "vegan", "vegetarian",
    "venezuelan", "vietnamese", "piedmontese", "seafood", "pasta",
    "grill", "dim_sum", "bistro",
]

OUTDOOR = [("no", 59), ("yes", 33)]
TAKEAWAY = [("yes", 62), ("no", 10), ("only", 4)]
N_RESTAURANTS = 719
N_NAMED = 675


def expand(dist):
    out = []
    for value, count in dist:
        out.extend([value] * count)
    return out


def spread(rng, n):
    """Assigns each value of a list to a distinct random restaurant index."""
    return rng.sample(range(N_RESTAURANTS), n)


def main(path):
    assert len(SINGLETONS) == 56 and len(set(SINGLETONS)) == 56
    listed = {v for v, _ in CUISINE}
    assert not listed & set(SINGLETONS)
    cuisine_values = expand(CUISINE) + SINGLETONS
    assert len(cuisine_values) == 432

    rng = random.Random(20190920)
    tags = [{"amenity": "restaurant"} for _ in range(N_RESTAURANTS)]
    for key, values in (("cuisine", cuisine_values),
                        ("outdoor_seating", expand(OUTDOOR)),
                        ("takeaway", expand(TAKEAWAY))):
        for idx, value in zip(spread(rng, len(values)), values):
            tags[idx][key] = value
    for n, idx in enumerate(sorted(spread(rng, N_NAMED))):
        tags[idx]["name"] = f"Ristorante {n + 1:03d}"

    south, west, north, east = BBOX
    elements = []
    for i, t in enumerate(tags):
        lat = round(rng.uniform(south + 0.001, north - 0.001), 6)
        lon = round(rng.uniform(west + 0.001, east - 0.001), 6)
        if i % 40 == 7:
            # Building outline: a closed ring of 4 distinct vertices.
            d = 0.0002
            ring = [(lat, lon), (lat, lon + d), (lat + d, lon + d), (lat + d, lon), (lat, lon)]
            elements.append({"type": "way", "id": 900000 + i,
                             "geometry": [{"lat": a, "lon": b} for a, b in ring],
                             "tags": t})
        elif i % 40 == 23:
            elements.append({"type": "way", "id": 900000 + i,
                             "center": {"lat": lat, "lon": lon}, "tags": t})
        else:
            elements.append({"type": "node", "id": 100000 + i,
                             "lat": lat, "lon": lon, "tags": t})

    # Elements the ingestion must drop.
    elements.append({"type": "node", "id": 1, "lat": 45.07, "lon": 7.68,
                     "tags": {"amenity": "bench"}})
    elements.append({"type": "node", "id": 2, "lat": 45.07, "lon": 7.69})
    elements.append({"type": "node", "id": 3, "lat": 45.46, "lon": 9.19,
                     "tags": {"amenity": "restaurant", "cuisine": "pizza",
                              "name": "Fuori Torino"}})
    elements.append({"type": "node", "id": 4,
                     "tags": {"amenity": "restaurant", "name": "Senza Posizione"}})
    elements.append({"type": "relation", "id": 5,
                     "tags": {"amenity": "restaurant", "name": "Relazione"}})

    doc = {"version": 0.6, "generator": "fixture", "elements": elements}
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=None, separators=(",", ":"))
        f.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "torino_restaurants.json")

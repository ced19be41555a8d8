// Copyright 2026 The Authors.
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
//
// JSON instance schemas and deterministic instance generators.

#ifndef GSP_IO_HPP_
#define GSP_IO_HPP_

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "gsp/assignment.hpp"
#include "gsp/matroid.hpp"
#include "gsp/random.hpp"
#include "gsp/set_function.hpp"

namespace gsp {

// Weighted-coverage instance plus its partition matroid, in serializable
// form: element e covers item ids covers[e]; parts/bounds define the matroid.
struct CoverageInstance {
  std::vector<std::vector<int>> covers;
  std::vector<double> item_weights;
  std::vector<std::vector<int>> parts;
  std::vector<int> bounds;
};

inline CoverageFunction make_coverage_function(const CoverageInstance& inst) {
  std::vector<ElementSet> covers;
  covers.reserve(inst.covers.size());
  for (const auto& c : inst.covers) {
    ElementSet s;
    for (int item : c) {
      GSP_REQUIRE(item >= 0 &&
                      item < static_cast<int>(inst.item_weights.size()),
                  "CoverageInstance: cover references unknown item");
      s.insert(item);
    }
    covers.push_back(s);
  }
  return CoverageFunction(std::move(covers), inst.item_weights);
}

inline PartitionMatroid make_partition_matroid(const CoverageInstance& inst) {
  return PartitionMatroid(inst.parts, inst.bounds);
}

inline nlohmann::json coverage_to_json(const CoverageInstance& inst) {
  nlohmann::json j;
  j["elements"] = nlohmann::json::array();
  for (const auto& c : inst.covers)
    j["elements"].push_back(nlohmann::json{{"covers", c}});
  j["item_weights"] = inst.item_weights;
  j["parts"] = inst.parts;
  j["bounds"] = inst.bounds;
  return j;
}

inline CoverageInstance coverage_from_json(const nlohmann::json& j) {
  GSP_REQUIRE(j.contains("elements") && j.contains("item_weights") &&
                  j.contains("parts") && j.contains("bounds"),
              "coverage instance: missing elements/item_weights/parts/bounds");
  CoverageInstance inst;
  for (const auto& e : j.at("elements"))
    inst.covers.push_back(e.at("covers").get<std::vector<int>>());
  inst.item_weights = j.at("item_weights").get<std::vector<double>>();
  inst.parts = j.at("parts").get<std::vector<std::vector<int>>>();
  inst.bounds = j.at("bounds").get<std::vector<int>>();
  // Constructor checks cover ids, weights, and the partition structure.
  make_coverage_function(inst);
  make_partition_matroid(inst);
  return inst;
}

inline nlohmann::json gap_to_json(const GapInstance& gap) {
  validate_gap(gap);
  return nlohmann::json{{"bins", gap.bins},
                        {"items", gap.items},
                        {"values", gap.values},
                        {"sizes", gap.sizes}};
}

inline GapInstance gap_from_json(const nlohmann::json& j) {
  GSP_REQUIRE(j.contains("bins") && j.contains("items") &&
                  j.contains("values") && j.contains("sizes"),
              "gap instance: missing bins/items/values/sizes");
  GapInstance gap;
  gap.bins = j.at("bins").get<int>();
  gap.items = j.at("items").get<int>();
  gap.values = j.at("values").get<std::vector<std::vector<double>>>();
  gap.sizes = j.at("sizes").get<std::vector<std::vector<double>>>();
  validate_gap(gap);
  return gap;
}

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  GSP_REQUIRE(in.good(), "cannot open instance file: " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

inline void save_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  GSP_REQUIRE(out.good(), "cannot write file: " + path);
  out << j.dump(2) << "\n";
}

// Random weighted-coverage instance over a simple partition: n elements in k
// singleton-bound parts, `items` weighted universe items. Deterministic in
// the seed.
inline CoverageInstance generate_coverage(int n, int k, int items,
                                          uint64_t seed) {
  GSP_REQUIRE(n >= 1 && k >= 1 && k <= n && items >= 1,
              "generate_coverage: need 1 <= k <= n and items >= 1");
  GSP_REQUIRE(items <= ElementSet::kMaxGroundSize,
              "generate_coverage: too many universe items");
  Rng rng(seed, kAuxStream);
  CoverageInstance inst;
  inst.covers.resize(n);
  for (int e = 0; e < n; ++e) {
    int deg = 1 + rng.uniform_int(std::max(1, items / 2));
    ElementSet s;
    for (int d = 0; d < deg; ++d) s.insert(rng.uniform_int(items));
    s.for_each([&](ElementId item) { inst.covers[e].push_back(item); });
  }
  inst.item_weights.resize(items);
  for (double& w : inst.item_weights) w = 0.2 + rng.uniform01();
  inst.parts.assign(k, {});
  for (int e = 0; e < k; ++e) inst.parts[e].push_back(e);
  for (int e = k; e < n; ++e) inst.parts[rng.uniform_int(k)].push_back(e);
  for (auto& p : inst.parts) std::sort(p.begin(), p.end());
  inst.bounds.assign(k, 1);
  return inst;
}

// Submodular welfare as coverage over a partition matroid: element
// item*players + player means "give this item to this player", one part per
// item (rank = items). Player utilities are coverage over disjoint slices of
// a shared weighted universe, so their sum is again a single coverage
// function.
inline CoverageInstance generate_welfare(int players, int items,
                                         int universe_per_player,
                                         uint64_t seed) {
  GSP_REQUIRE(players >= 1 && items >= 1 && universe_per_player >= 1,
              "generate_welfare: all dimensions must be >= 1");
  GSP_REQUIRE(players * universe_per_player <= ElementSet::kMaxGroundSize,
              "generate_welfare: universe too large");
  Rng rng(seed, kAuxStream);
  CoverageInstance inst;
  inst.covers.resize(players * items);
  for (int item = 0; item < items; ++item)
    for (int p = 0; p < players; ++p) {
      int e = item * players + p;
      int base = p * universe_per_player;
      int deg = 1 + rng.uniform_int(std::max(1, universe_per_player / 2));
      ElementSet s;
      for (int d = 0; d < deg; ++d)
        s.insert(base + rng.uniform_int(universe_per_player));
      s.for_each([&](ElementId u) { inst.covers[e].push_back(u); });
    }
  inst.item_weights.resize(players * universe_per_player);
  for (double& w : inst.item_weights) w = 0.2 + rng.uniform01();
  inst.parts.assign(items, {});
  for (int item = 0; item < items; ++item)
    for (int p = 0; p < players; ++p)
      inst.parts[item].push_back(item * players + p);
  inst.bounds.assign(items, 1);
  return inst;
}

inline GapInstance generate_gap(int bins, int items, uint64_t seed) {
  GSP_REQUIRE(bins >= 1 && items >= 1, "generate_gap: need bins, items >= 1");
  Rng rng(seed, kAuxStream);
  GapInstance gap;
  gap.bins = bins;
  gap.items = items;
  gap.values.assign(bins, std::vector<double>(items));
  gap.sizes.assign(bins, std::vector<double>(items));
  for (int i = 0; i < bins; ++i)
    for (int j = 0; j < items; ++j) {
      gap.values[i][j] = rng.uniform01();
      gap.sizes[i][j] = 0.25 + 0.5 * rng.uniform01();
    }
  return gap;
}

}  // namespace gsp

#endif  // GSP_IO_HPP_

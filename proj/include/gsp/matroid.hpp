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

#ifndef GSP_MATROID_HPP_
#define GSP_MATROID_HPP_

#include <algorithm>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "gsp/element_set.hpp"
#include "gsp/random.hpp"

namespace gsp {

using Base = ElementSet;

class Matroid {
 public:
  virtual ~Matroid() = default;
  virtual int ground_size() const = 0;
  virtual int rank() const = 0;
  virtual bool is_independent(const ElementSet& s) const = 0;

  bool is_base(const ElementSet& s) const {
    return s.size() == rank() && is_independent(s);
  }
};

// Pick at most bounds[j] elements from parts[j]. Simple case: all bounds 1.
class PartitionMatroid : public Matroid {
 public:
  PartitionMatroid(std::vector<std::vector<ElementId>> parts,
                   std::vector<int> bounds)
      : parts_(std::move(parts)), bounds_(std::move(bounds)) {
    GSP_REQUIRE(parts_.size() == bounds_.size(),
                "PartitionMatroid: one bound per part required");
    int n = 0;
    for (const auto& p : parts_) {
      for (ElementId e : p) n = std::max(n, e + 1);
    }
    GSP_REQUIRE(n <= ElementSet::kMaxGroundSize,
                "PartitionMatroid: ground set too large");
    part_of_.assign(n, -1);
    rank_ = 0;
    for (size_t j = 0; j < parts_.size(); ++j) {
      GSP_REQUIRE(!parts_[j].empty(), "PartitionMatroid: empty part");
      GSP_REQUIRE(bounds_[j] >= 1 &&
                      bounds_[j] <= static_cast<int>(parts_[j].size()),
                  "PartitionMatroid: bound must be in [1, |part|]");
      for (ElementId e : parts_[j]) {
        GSP_REQUIRE(e >= 0, "PartitionMatroid: negative element id");
        GSP_REQUIRE(part_of_[e] == -1, "PartitionMatroid: parts overlap");
        part_of_[e] = static_cast<int>(j);
      }
      rank_ += bounds_[j];
    }
    for (int e = 0; e < n; ++e)
      GSP_REQUIRE(part_of_[e] != -1,
                  "PartitionMatroid: parts must cover 0..n-1");
    ground_size_ = n;
  }

  int ground_size() const override { return ground_size_; }
  int rank() const override { return rank_; }

  bool is_independent(const ElementSet& s) const override {
    std::vector<int> cnt(parts_.size(), 0);
    bool ok = true;
    s.for_each([&](ElementId e) {
      if (e >= ground_size_ || ++cnt[part_of_[e]] > bounds_[part_of_[e]])
        ok = false;
    });
    return ok;
  }

  int num_parts() const { return static_cast<int>(parts_.size()); }
  const std::vector<ElementId>& part(int j) const { return parts_[j]; }
  int bound(int j) const { return bounds_[j]; }
  int part_of(ElementId e) const { return part_of_[e]; }
  bool is_simple() const {
    return std::all_of(bounds_.begin(), bounds_.end(),
                       [](int b) { return b == 1; });
  }

 private:
  std::vector<std::vector<ElementId>> parts_;
  std::vector<int> bounds_;
  std::vector<int> part_of_;
  int ground_size_ = 0;
  int rank_ = 0;
};

class UniformMatroid : public Matroid {
 public:
  UniformMatroid(int n, int r) : n_(n), r_(r) {
    GSP_REQUIRE(n >= 1 && r >= 1 && r <= n, "UniformMatroid: need 1<=r<=n");
  }
  int ground_size() const override { return n_; }
  int rank() const override { return r_; }
  bool is_independent(const ElementSet& s) const override {
    return s.size() <= r_;
  }

 private:
  int n_, r_;
};

// Independence-predicate matroid for tests and small general instances.
// The rank is computed once by greedy augmentation (valid for any matroid).
class OracleMatroid : public Matroid {
 public:
  OracleMatroid(int n, std::function<bool(const ElementSet&)> pred)
      : n_(n), pred_(std::move(pred)) {
    ElementSet s;
    for (ElementId e = 0; e < n_; ++e) {
      if (pred_(s.with(e))) s.insert(e);
    }
    rank_ = s.size();
  }
  int ground_size() const override { return n_; }
  int rank() const override { return rank_; }
  bool is_independent(const ElementSet& s) const override { return pred_(s); }

 private:
  int n_;
  std::function<bool(const ElementSet&)> pred_;
  int rank_;
};

// Bijection h between two bases with h(i) = i on the intersection and
// B1 - i + h(i) independent for every i in B1.
class ExchangeMap {
 public:
  void add(ElementId from, ElementId to) { pairs_.emplace_back(from, to); }
  ElementId image_of(ElementId from) const {
    for (const auto& [a, b] : pairs_)
      if (a == from) return b;
    throw std::invalid_argument("ExchangeMap: element not in domain");
  }
  const std::vector<std::pair<ElementId, ElementId>>& pairs() const {
    return pairs_;
  }
  int moved_count() const {
    int c = 0;
    for (const auto& [a, b] : pairs_)
      if (a != b) ++c;
    return c;
  }

 private:
  std::vector<std::pair<ElementId, ElementId>> pairs_;
};

// Max-weight base by matroid greedy. Ties and equal weights resolve toward
// smaller element ids, so equal weights yield the lexicographically smallest
// base and the argmax is right continuous in the weights.
inline Base greedy_max_weight_base(const Matroid& m,
                                   const std::vector<double>& weights) {
  GSP_REQUIRE(static_cast<int>(weights.size()) == m.ground_size(),
              "greedy_max_weight_base: one weight per element required");
  if (const auto* pm = dynamic_cast<const PartitionMatroid*>(&m)) {
    Base b;
    for (int j = 0; j < pm->num_parts(); ++j) {
      std::vector<ElementId> ids = pm->part(j);
      std::sort(ids.begin(), ids.end(), [&](ElementId a, ElementId c) {
        if (weights[a] != weights[c]) return weights[a] > weights[c];
        return a < c;
      });
      for (int s = 0; s < pm->bound(j); ++s) b.insert(ids[s]);
    }
    return b;
  }
  std::vector<ElementId> order(m.ground_size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](ElementId a, ElementId c) {
    if (weights[a] != weights[c]) return weights[a] > weights[c];
    return a < c;
  });
  Base b;
  for (ElementId e : order) {
    if (b.size() == m.rank()) break;
    if (m.is_independent(b.with(e))) b.insert(e);
  }
  GSP_CHECK(b.size() == m.rank(),
            "greedy_max_weight_base: matroid has no base of stated rank");
  return b;
}

namespace internal {

// Augmenting-path bipartite matching from left items to right items.
inline bool kuhn_augment(int l, const std::vector<std::vector<char>>& adj,
                         std::vector<char>& used, std::vector<int>& match_r) {
  for (size_t r = 0; r < match_r.size(); ++r) {
    if (!adj[l][r] || used[r]) continue;
    used[r] = 1;
    if (match_r[r] == -1 || kuhn_augment(match_r[r], adj, used, match_r)) {
      match_r[r] = l;
      return true;
    }
  }
  return false;
}

}  // namespace internal

inline ExchangeMap base_exchange_map(const Matroid& m, const Base& b1,
                                     const Base& b2) {
  GSP_REQUIRE(m.is_base(b1) && m.is_base(b2),
              "base_exchange_map: inputs must be bases");
  ExchangeMap h;
  (b1 & b2).for_each([&](ElementId e) { h.add(e, e); });
  std::vector<ElementId> d1 = (b1 - b2).to_vector();
  std::vector<ElementId> d2 = (b2 - b1).to_vector();
  if (d1.empty()) return h;

  if (const auto* pm = dynamic_cast<const PartitionMatroid*>(&m)) {
    // Bases hold exactly bound(j) elements per part, so the leaving and
    // entering elements of each part pair up; ascending order on both sides.
    std::vector<std::vector<ElementId>> out(pm->num_parts()),
        in(pm->num_parts());
    for (ElementId e : d1) out[pm->part_of(e)].push_back(e);
    for (ElementId e : d2) in[pm->part_of(e)].push_back(e);
    for (int j = 0; j < pm->num_parts(); ++j) {
      GSP_CHECK(out[j].size() == in[j].size(),
                "base_exchange_map: inputs are not bases of this partition");
      for (size_t s = 0; s < out[j].size(); ++s) h.add(out[j][s], in[j][s]);
    }
    return h;
  }

  std::vector<std::vector<char>> adj(d1.size(),
                                     std::vector<char>(d2.size(), 0));
  for (size_t i = 0; i < d1.size(); ++i) {
    for (size_t j = 0; j < d2.size(); ++j) {
      adj[i][j] = m.is_independent(b1.without(d1[i]).with(d2[j]));
    }
  }
  std::vector<int> match_r(d2.size(), -1);
  for (size_t i = 0; i < d1.size(); ++i) {
    std::vector<char> used(d2.size(), 0);
    GSP_CHECK(internal::kuhn_augment(static_cast<int>(i), adj, used, match_r),
              "base_exchange_map: no perfect exchange matching; "
              "independence oracle violates the matroid axioms");
  }
  for (size_t j = 0; j < d2.size(); ++j) h.add(d1[match_r[j]], d2[j]);
  return h;
}

// A valid base chosen at random. Partition matroids: uniform per-part
// selection (uniform over all bases). General matroids: greedy over a random
// element order, which is NOT uniform over bases; callers that only need an
// arbitrary starting base are unaffected.
inline Base uniform_random_base(const Matroid& m, Rng& rng) {
  if (const auto* pm = dynamic_cast<const PartitionMatroid*>(&m)) {
    Base b;
    for (int j = 0; j < pm->num_parts(); ++j) {
      std::vector<ElementId> ids = pm->part(j);
      for (int s = 0; s < pm->bound(j); ++s) {
        int pick = s + rng.uniform_int(static_cast<int>(ids.size()) - s);
        std::swap(ids[s], ids[pick]);
        b.insert(ids[s]);
      }
    }
    return b;
  }
  std::vector<ElementId> order(m.ground_size());
  std::iota(order.begin(), order.end(), 0);
  for (int i = static_cast<int>(order.size()) - 1; i > 0; --i) {
    std::swap(order[i], order[rng.uniform_int(i + 1)]);
  }
  Base b;
  for (ElementId e : order) {
    if (b.size() == m.rank()) break;
    if (m.is_independent(b.with(e))) b.insert(e);
  }
  GSP_CHECK(b.size() == m.rank(), "uniform_random_base: no base found");
  return b;
}

struct AxiomReport {
  bool pass = true;
  std::string first_violation;
};

// Exhaustive check of the three matroid axioms; refuses ground sets with
// more than 12 elements.
inline AxiomReport verify_matroid_axioms(const Matroid& m) {
  GSP_REQUIRE(m.ground_size() <= 12,
              "verify_matroid_axioms: ground set too large to enumerate");
  const int n = m.ground_size();
  const uint32_t full = 1u << n;
  auto to_set = [](uint32_t mask) {
    ElementSet s;
    for (int e = 0; mask; ++e, mask >>= 1)
      if (mask & 1) s.insert(e);
    return s;
  };
  std::vector<char> indep(full);
  std::vector<int> card(full);
  for (uint32_t mask = 0; mask < full; ++mask) {
    indep[mask] = m.is_independent(to_set(mask));
    card[mask] = std::popcount(mask);
  }
  AxiomReport rep;
  if (!indep[0]) {
    rep.pass = false;
    rep.first_violation = "empty set not independent";
    return rep;
  }
  for (uint32_t mask = 1; mask < full; ++mask) {
    if (!indep[mask]) continue;
    for (int e = 0; e < n; ++e) {
      if (!(mask & (1u << e))) continue;
      if (!indep[mask ^ (1u << e)]) {
        rep.pass = false;
        rep.first_violation = "downward closure fails: " +
                              to_set(mask).to_string() +
                              " independent but not its subset " +
                              to_set(mask ^ (1u << e)).to_string();
        return rep;
      }
    }
  }
  for (uint32_t s = 1; s < full; ++s) {
    if (!indep[s]) continue;
    for (uint32_t t = 0; t < full; ++t) {
      if (!indep[t] || card[s] <= card[t]) continue;
      bool found = false;
      uint32_t cand = s & ~t;
      while (cand && !found) {
        uint32_t low = cand & (~cand + 1);
        if (indep[t | low]) found = true;
        cand ^= low;
      }
      if (!found) {
        rep.pass = false;
        rep.first_violation = "exchange fails for S=" + to_set(s).to_string() +
                              ", T=" + to_set(t).to_string();
        return rep;
      }
    }
  }
  return rep;
}

}  // namespace gsp

#endif  // GSP_MATROID_HPP_

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
// Swap procedures for partition matroids: an exact-extension swap and a
// bandit swap for simple partitions (every bound 1), plus the copy-lifted
// reduced instance and its swaps for generalized partitions.

#ifndef GSP_PARTITION_SWAPS_HPP_
#define GSP_PARTITION_SWAPS_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gsp/bandits.hpp"
#include "gsp/matroid.hpp"
#include "gsp/multilinear.hpp"
#include "gsp/poisson.hpp"
#include "gsp/random.hpp"
#include "gsp/set_function.hpp"

namespace gsp {
namespace internal {

inline std::vector<ElementId> sorted_part(const PartitionMatroid& pm, int j) {
  std::vector<ElementId> part = pm.part(j);
  std::sort(part.begin(), part.end());
  return part;
}

inline std::vector<ElementId> base_elements_in_part(const PartitionMatroid& pm,
                                                    const Base& a, int j) {
  std::vector<ElementId> out;
  for (ElementId e : sorted_part(pm, j))
    if (a.contains(e)) out.push_back(e);
  GSP_ASSERT(!out.empty(), "base_elements_in_part: base misses a part");
  return out;
}

// Deterministic inner step of the exact-extension swap once the part is
// fixed: out is the part's base element, in its max-gradient element
// (smallest id on ties). Costs exactly 2|U_j| extension evaluations.
inline SwapDecision exact_part_swap(double t, const Base& a,
                                    const ValueOracle& f,
                                    const PartitionMatroid& pm, int j) {
  std::vector<ElementId> owners = base_elements_in_part(pm, a, j);
  GSP_ASSERT(owners.size() == 1, "exact_part_swap: partition not simple");
  ScaledBasePoint p{t, a};
  double best = -std::numeric_limits<double>::infinity();
  ElementId in = -1;
  for (ElementId e : sorted_part(pm, j)) {
    double g = gradient_at_scaled_base(f, p, e);
    if (g > best) {
      best = g;
      in = e;
    }
  }
  return {owners[0], in};
}

// Part index drawn with probability bound(j) / rank.
inline int sample_part_by_bound(const PartitionMatroid& pm, Rng& rng) {
  int u = rng.uniform_int(pm.rank());
  for (int j = 0; j < pm.num_parts(); ++j) {
    u -= pm.bound(j);
    if (u < 0) return j;
  }
  GSP_ASSERT(false, "sample_part_by_bound: bounds do not sum to rank");
  return 0;
}

}  // namespace internal

// Exact-gradient swap for simple partition matroids: pick a part uniformly
// at random, swap its base element for the part's max-gradient element.
inline SwapDecision partition_swap_F(double t, const Base& a,
                                     const ValueOracle& f,
                                     const PartitionMatroid& pm, Rng& rng) {
  GSP_REQUIRE(pm.is_simple(), "partition_swap_F: every part bound must be 1");
  GSP_REQUIRE(pm.is_base(a), "partition_swap_F: A must be a base");
  return internal::exact_part_swap(t, a, f, pm,
                                   rng.uniform_int(pm.num_parts()));
}

class PartitionSwapF : public SwapProcedure {
 public:
  PartitionSwapF(const ValueOracle& f, const PartitionMatroid& pm)
      : f_(f), pm_(pm) {
    GSP_REQUIRE(pm.is_simple(), "PartitionSwapF: every part bound must be 1");
    GSP_REQUIRE(f.ground_size() == pm.ground_size(),
                "PartitionSwapF: ground set mismatch");
  }

  SwapDecision propose(double t, const Base& a, Rng& rng) override {
    return partition_swap_F(t, a, f_, pm_, rng);
  }

  ContractTag contract_tag() const override { return {true, 1.0, 0.0, ""}; }

  std::optional<std::vector<std::pair<double, SwapDecision>>>
  enumerate_outcomes(double t, const Base& a) override {
    GSP_REQUIRE(pm_.is_base(a), "PartitionSwapF: A must be a base");
    std::vector<std::pair<double, SwapDecision>> out;
    const double p = 1.0 / pm_.num_parts();
    for (int j = 0; j < pm_.num_parts(); ++j)
      out.emplace_back(p, internal::exact_part_swap(t, a, f_, pm_, j));
    return out;
  }

 private:
  const ValueOracle& f_;
  const PartitionMatroid& pm_;
};

// Value-oracle swap for simple partition matroids: pick a part uniformly,
// then run PAC best-arm identification over the part's sampled marginals,
// scaled into [0,1] by the part's largest singleton marginal. A part whose
// singleton marginals are all zero yields the no-op (monotonicity makes
// every gradient there zero, so any exchange is equivalent).
inline SwapDecision simple_bandit_swap(double t, const Base& a,
                                       const ValueOracle& f,
                                       const PartitionMatroid& pm,
                                       double delta, Rng& rng) {
  GSP_REQUIRE(pm.is_simple(), "simple_bandit_swap: every part bound must be 1");
  GSP_REQUIRE(pm.is_base(a), "simple_bandit_swap: A must be a base");
  GSP_REQUIRE(delta > 0.0 && delta < 1.0,
              "simple_bandit_swap: delta must be in (0,1)");
  const int j = rng.uniform_int(pm.num_parts());
  std::vector<ElementId> part = internal::sorted_part(pm, j);
  const ElementId out = internal::base_elements_in_part(pm, a, j)[0];

  double alpha = 0.0;
  for (ElementId e : part) alpha = std::max(alpha, f.singleton_marginal(e));
  if (alpha <= 0.0) return {out, out};

  std::vector<ArmSampler> arms;
  arms.reserve(part.size());
  for (ElementId e : part) {
    arms.push_back({[&f, t, a, e, alpha](Rng& r) {
                      return sample_marginal(f, ScaledBasePoint{t, a}, e, r) /
                             alpha;
                    },
                    "e" + std::to_string(e)});
  }
  return {out, part[best_arm(arms, delta, rng)]};
}

class SimpleBanditSwap : public SwapProcedure {
 public:
  SimpleBanditSwap(const ValueOracle& f, const PartitionMatroid& pm,
                   double delta)
      : f_(f), pm_(pm), delta_(delta) {
    GSP_REQUIRE(pm.is_simple(), "SimpleBanditSwap: every part bound must be 1");
    GSP_REQUIRE(f.ground_size() == pm.ground_size(),
                "SimpleBanditSwap: ground set mismatch");
    GSP_REQUIRE(delta > 0.0 && delta < 1.0,
                "SimpleBanditSwap: delta must be in (0,1)");
  }

  SwapDecision propose(double t, const Base& a, Rng& rng) override {
    return simple_bandit_swap(t, a, f_, pm_, delta_, rng);
  }

  ContractTag contract_tag() const override {
    return {false, 1.0, 0.0,
            "eta = delta * (sum of per-part max singleton marginals) / opt"};
  }

 private:
  const ValueOracle& f_;
  const PartitionMatroid& pm_;
  double delta_;
};

// Lifted copy function: every item has copies_per_item slots and a copy set
// evaluates to f of its projected item set. Billing is shared with the
// original oracle, so one lifted query costs one value query.
class ReducedFunction : public ValueOracle {
 public:
  ReducedFunction(const ValueOracle& f, int copies_per_item)
      : ValueOracle(f.ground_size() * copies_per_item),
        f_(&f),
        copies_(copies_per_item) {
    GSP_REQUIRE(copies_per_item >= 1, "ReducedFunction: need at least 1 copy");
    adopt_counters(f.counters_ptr());
  }

  int copies_per_item() const { return copies_; }
  ElementId copy_id(ElementId item, int slot) const {
    GSP_REQUIRE(item >= 0 && item < f_->ground_size() && slot >= 0 &&
                    slot < copies_,
                "ReducedFunction: bad copy coordinates");
    return item * copies_ + slot;
  }
  ElementId item_of(ElementId copy) const { return copy / copies_; }
  int slot_of(ElementId copy) const { return copy % copies_; }

  ElementSet project(const ElementSet& copies) const {
    ElementSet items;
    copies.for_each([&](ElementId c) { items.insert(item_of(c)); });
    return items;
  }

 protected:
  double eval(const ElementSet& s) const override {
    return f_->raw_value(project(s));
  }

 private:
  const ValueOracle* f_;
  int copies_;
};

// Generalized-partition instance lifted to copies: rank + 1 slots per item
// guarantee every item keeps a copy outside any base. Part bounds carry
// over, so optimal values of the original and lifted instances coincide.
struct ReducedInstance {
  std::shared_ptr<ReducedFunction> g;
  std::shared_ptr<PartitionMatroid> matroid;
  const ValueOracle* original = nullptr;
  const PartitionMatroid* original_matroid = nullptr;
};

inline ReducedInstance build_reduced_instance(const ValueOracle& f,
                                              const PartitionMatroid& pm) {
  GSP_REQUIRE(f.ground_size() == pm.ground_size(),
              "build_reduced_instance: ground set mismatch");
  const int copies = pm.rank() + 1;
  GSP_REQUIRE(f.ground_size() * copies <= ElementSet::kMaxGroundSize,
              "build_reduced_instance: copy universe too large");
  ReducedInstance red;
  red.g = std::make_shared<ReducedFunction>(f, copies);
  std::vector<std::vector<ElementId>> copy_parts(pm.num_parts());
  std::vector<int> bounds(pm.num_parts());
  for (int j = 0; j < pm.num_parts(); ++j) {
    for (ElementId item : internal::sorted_part(pm, j))
      for (int s = 0; s < copies; ++s)
        copy_parts[j].push_back(red.g->copy_id(item, s));
    bounds[j] = pm.bound(j);
  }
  red.matroid = std::make_shared<PartitionMatroid>(copy_parts, bounds);
  red.original = &f;
  red.original_matroid = &pm;
  return red;
}

// Copies of an item are interchangeable, so every item-level base has a copy
// representative avoiding any fixed base A: rank + 1 slots cannot all be
// taken. Maps each item to its smallest free slot, matching the candidate
// set generalized_swap_F scans, and keeps the represented value unchanged.
// Useful to pin the optimum representative when certifying swap contracts on
// the lifted instance, where the optimum is degenerate across slots.
inline ElementSet reduced_optimum_on_free_slots(const ReducedInstance& red,
                                                const ElementSet& item_base,
                                                const ElementSet& a) {
  ElementSet out;
  item_base.for_each([&](ElementId item) {
    for (int s = 0; s < red.g->copies_per_item(); ++s) {
      ElementId c = red.g->copy_id(item, s);
      if (!a.contains(c)) {
        out.insert(c);
        return;
      }
    }
    GSP_CHECK(false, "reduced_optimum_on_free_slots: no free slot");
  });
  return out;
}

// Lifted extension G(y) evaluated through the original one: collapse each
// item's copies to x_i = 1 - prod_s (1 - y_(i,s)), then G(y) = F(x). One
// extension query per call.
inline double reduced_extension_value(
    const ReducedInstance& red, const FractionalPoint& y,
    int support_cap = kDefaultFractionalSupportCap) {
  GSP_REQUIRE(y.size() == red.g->ground_size(),
              "reduced_extension_value: dimension mismatch");
  const int n = red.original->ground_size();
  const int copies = red.g->copies_per_item();
  FractionalPoint x(n);
  for (ElementId i = 0; i < n; ++i) {
    double keep = 1.0;
    for (int s = 0; s < copies; ++s) keep *= 1.0 - y[red.g->copy_id(i, s)];
    x.set(i, 1.0 - keep);
  }
  return exact_multilinear(*red.original, x, support_cap);
}

// Exact gradient of the lifted extension at copy e and point t * 1_A, via
// two original-extension evaluations: all of item's other copies in A leave
// x_item = 1 - (1-t)^count in the low point, and the high point pins it
// to 1.
inline double reduced_copy_gradient(
    const ReducedInstance& red, double t, const Base& a, ElementId e,
    int support_cap = kDefaultFractionalSupportCap) {
  GSP_REQUIRE(t > 0.0 && t <= 1.0, "reduced_copy_gradient: t must be in (0,1]");
  const int n = red.original->ground_size();
  std::vector<int> occupancy(n, 0);
  a.for_each([&](ElementId c) { ++occupancy[red.g->item_of(c)]; });

  const ElementId item = red.g->item_of(e);
  FractionalPoint hi(n), lo(n);
  for (ElementId i = 0; i < n; ++i) {
    int occ = occupancy[i];
    if (i == item && a.contains(e)) --occ;
    double x = 1.0 - std::pow(1.0 - t, occ);
    hi.set(i, i == item ? 1.0 : x);
    lo.set(i, x);
  }
  return exact_multilinear(*red.original, hi, support_cap) -
         exact_multilinear(*red.original, lo, support_cap);
}

namespace internal {

// One candidate copy per item of original part j: the smallest free slot.
inline std::vector<ElementId> candidate_copies_in_part(
    const ReducedInstance& red, const Base& a, int j) {
  std::vector<ElementId> cand;
  for (ElementId item : sorted_part(*red.original_matroid, j)) {
    ElementId chosen = -1;
    for (int s = 0; s < red.g->copies_per_item(); ++s) {
      ElementId c = red.g->copy_id(item, s);
      if (!a.contains(c)) {
        chosen = c;
        break;
      }
    }
    GSP_ASSERT(chosen != -1,
               "candidate_copies_in_part: item has no free copy slot");
    cand.push_back(chosen);
  }
  return cand;
}

// Shared front half of the generalized swaps: part draw proportional to its
// bound, then a uniform sample X of candidate copies of the prescribed
// size, then a uniform out-element of A in the part.
struct GeneralizedDraw {
  int part = 0;
  std::vector<ElementId> sample;
  ElementId out = -1;
};

inline GeneralizedDraw generalized_draw(const Base& a,
                                        const ReducedInstance& red,
                                        double delta, Rng& rng) {
  const PartitionMatroid& pm = *red.matroid;
  GSP_REQUIRE(pm.is_base(a), "generalized swap: A must be a base of copies");
  GSP_REQUIRE(delta > 0.0 && delta < 1.0,
              "generalized swap: delta must be in (0,1)");
  GeneralizedDraw d;
  d.part = sample_part_by_bound(pm, rng);

  std::vector<ElementId> cand = candidate_copies_in_part(red, a, d.part);
  const double part_size = static_cast<double>(cand.size());
  const double bound = pm.bound(d.part);
  long long m = static_cast<long long>(
      std::ceil(part_size / bound * std::log(1.0 / delta)));
  m = std::clamp<long long>(m, 1, cand.size());
  for (long long i = 0; i < m; ++i) {
    int pick = i + rng.uniform_int(static_cast<int>(cand.size() - i));
    std::swap(cand[i], cand[pick]);
  }
  cand.resize(m);
  d.sample = std::move(cand);

  std::vector<ElementId> owners = base_elements_in_part(pm, a, d.part);
  d.out = owners[rng.uniform_int(static_cast<int>(owners.size()))];
  return d;
}

}  // namespace internal

// Exact-extension swap for generalized partitions on the lifted instance:
// the in-element is the exact max-gradient copy over the random candidate
// sample X, so the miss probability of the best candidate is at most delta.
inline SwapDecision generalized_swap_F(double t, const Base& a,
                                       const ReducedInstance& red,
                                       double delta, Rng& rng) {
  internal::GeneralizedDraw d = internal::generalized_draw(a, red, delta, rng);
  double best = -std::numeric_limits<double>::infinity();
  ElementId in = -1;
  for (ElementId e : d.sample) {
    double g = reduced_copy_gradient(red, t, a, e);
    if (g > best) {
      best = g;
      in = e;
    }
  }
  return {d.out, in};
}

class GeneralizedSwapF : public SwapProcedure {
 public:
  GeneralizedSwapF(ReducedInstance red, double delta)
      : red_(std::move(red)), delta_(delta) {
    GSP_REQUIRE(delta > 0.0 && delta < 1.0,
                "GeneralizedSwapF: delta must be in (0,1)");
  }

  SwapDecision propose(double t, const Base& a, Rng& rng) override {
    return generalized_swap_F(t, a, red_, delta_, rng);
  }

  ContractTag contract_tag() const override {
    return {false, 1.0 - delta_, 0.0, ""};
  }

 private:
  ReducedInstance red_;
  double delta_;
};

// Value-oracle swap for generalized partitions: like generalized_swap_F but
// the argmax over the candidate sample is replaced by best-arm
// identification at the tighter accuracy delta / ln(1/delta), with arm
// rewards scaled into [0,1] by the sample's largest singleton marginal.
inline SwapDecision generalized_swap_f(double t, const Base& a,
                                       const ReducedInstance& red,
                                       double delta, Rng& rng) {
  GSP_REQUIRE(delta > 0.0 && delta < std::exp(-1.0),
              "generalized_swap_f: delta must be in (0, 1/e)");
  internal::GeneralizedDraw d = internal::generalized_draw(a, red, delta, rng);

  double alpha = 0.0;
  for (ElementId e : d.sample)
    alpha = std::max(alpha, red.g->singleton_marginal(e));
  if (alpha <= 0.0) return {d.out, d.out};

  const ReducedFunction& g = *red.g;
  std::vector<ArmSampler> arms;
  arms.reserve(d.sample.size());
  for (ElementId e : d.sample) {
    arms.push_back({[&g, t, a, e, alpha](Rng& r) {
                      return sample_marginal(g, ScaledBasePoint{t, a}, e, r) /
                             alpha;
                    },
                    "c" + std::to_string(e)});
  }
  const double delta_prime = delta / std::log(1.0 / delta);
  return {d.out, d.sample[best_arm(arms, delta_prime, rng)]};
}

class GeneralizedSwapf : public SwapProcedure {
 public:
  GeneralizedSwapf(ReducedInstance red, double delta)
      : red_(std::move(red)), delta_(delta) {
    GSP_REQUIRE(delta > 0.0 && delta < std::exp(-1.0),
                "GeneralizedSwapf: delta must be in (0, 1/e)");
  }

  SwapDecision propose(double t, const Base& a, Rng& rng) override {
    return generalized_swap_f(t, a, red_, delta_, rng);
  }

  ContractTag contract_tag() const override {
    return {false, 1.0 - delta_, 0.0,
            "eta = delta * (sum of per-part top-bound singleton marginals) / "
            "opt"};
  }

 private:
  ReducedInstance red_;
  double delta_;
};

}  // namespace gsp

#endif  // GSP_PARTITION_SWAPS_HPP_

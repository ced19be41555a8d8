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
// Separable assignment / generalized assignment solver: the per-bin set
// universe, closed-form swap weights, knapsack packing, value rounding, and
// the Poisson swap loop over the bin matroid.

#ifndef GSP_ASSIGNMENT_HPP_
#define GSP_ASSIGNMENT_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "gsp/element_set.hpp"
#include "gsp/poisson.hpp"
#include "gsp/random.hpp"

namespace gsp {

// Generalized assignment: m bins of capacity 1, n items with per-bin value
// v[i][j] >= 0 and size s[i][j] >= 0. A bin's feasible sets are the subsets
// that fit, which is down-closed.
struct GapInstance {
  int bins = 0;
  int items = 0;
  std::vector<std::vector<double>> values;
  std::vector<std::vector<double>> sizes;
};

inline void validate_gap(const GapInstance& gap) {
  GSP_REQUIRE(gap.bins >= 1 && gap.items >= 1, "GapInstance: empty dimensions");
  GSP_REQUIRE(gap.values.size() == static_cast<size_t>(gap.bins) &&
                  gap.sizes.size() == static_cast<size_t>(gap.bins),
              "GapInstance: row count must equal bins");
  for (int i = 0; i < gap.bins; ++i) {
    GSP_REQUIRE(gap.values[i].size() == static_cast<size_t>(gap.items) &&
                    gap.sizes[i].size() == static_cast<size_t>(gap.items),
                "GapInstance: column count must equal items");
    for (int j = 0; j < gap.items; ++j)
      GSP_REQUIRE(gap.values[i][j] >= 0.0 && gap.sizes[i][j] >= 0.0,
                  "GapInstance: values and sizes must be non-negative");
  }
}

// Separable assignment: values plus an opaque down-closed feasibility oracle
// per bin, and a packing subroutine that returns a feasible set whose weight
// is at least alpha times the best feasible weight for non-negative weights.
struct SapInstance {
  int bins = 0;
  int items = 0;
  std::vector<std::vector<double>> values;
  std::function<bool(int, const std::vector<int>&)> feasible;
  std::function<std::vector<int>(int, const std::vector<double>&)> approx_pack;
  double alpha = 1.0;
};

struct KnapsackMode {
  enum class Kind { kExactSmall, kFptas };
  Kind kind = Kind::kExactSmall;
  double eps = 0.0;

  static KnapsackMode exact_small() { return {Kind::kExactSmall, 0.0}; }
  static KnapsackMode fptas(double eps) {
    GSP_REQUIRE(eps > 0.0 && eps < 1.0, "KnapsackMode: fptas eps in (0,1)");
    return {Kind::kFptas, eps};
  }
};

// Max-weight knapsack. exact_small enumerates every subset (n <= 20); fptas
// runs the value-scaling dynamic program with ratio 1 - eps. Both return a
// set that fits the capacity; ties go to the first (lowest-index) subset.
inline std::vector<int> approx_pack_knapsack(
    const std::vector<double>& weights, const std::vector<double>& sizes,
    double capacity, const KnapsackMode& mode) {
  const int n = static_cast<int>(weights.size());
  GSP_REQUIRE(sizes.size() == weights.size(),
              "approx_pack_knapsack: weights/sizes length mismatch");
  GSP_REQUIRE(capacity >= 0.0, "approx_pack_knapsack: negative capacity");
  for (double w : weights)
    GSP_REQUIRE(w >= 0.0, "approx_pack_knapsack: weights must be >= 0");

  if (mode.kind == KnapsackMode::Kind::kExactSmall) {
    GSP_REQUIRE(n <= 20, "approx_pack_knapsack: exact_small refuses n > 20");
    uint32_t best_mask = 0;
    double best = 0.0;
    for (uint32_t mask = 1; mask < (1u << n); ++mask) {
      double size = 0.0, weight = 0.0;
      for (int j = 0; j < n; ++j)
        if (mask >> j & 1u) {
          size += sizes[j];
          weight += weights[j];
        }
      if (size <= capacity && weight > best) {
        best = weight;
        best_mask = mask;
      }
    }
    std::vector<int> out;
    for (int j = 0; j < n; ++j)
      if (best_mask >> j & 1u) out.push_back(j);
    return out;
  }

  // FPTAS: scale weights to integers in [0, n/eps], minimize size per scaled
  // value, take the largest reachable value that fits.
  std::vector<int> live;
  double wmax = 0.0;
  for (int j = 0; j < n; ++j)
    if (weights[j] > 0.0 && sizes[j] <= capacity) {
      live.push_back(j);
      wmax = std::max(wmax, weights[j]);
    }
  if (live.empty()) return {};
  const double scale = mode.eps * wmax / live.size();
  std::vector<long long> scaled;
  long long total = 0;
  for (int j : live) {
    scaled.push_back(static_cast<long long>(std::floor(weights[j] / scale)));
    total += scaled.back();
  }

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dp(total + 1, inf);
  dp[0] = 0.0;
  std::vector<std::vector<char>> take(live.size(),
                                      std::vector<char>(total + 1, 0));
  for (size_t idx = 0; idx < live.size(); ++idx) {
    for (long long v = total; v >= scaled[idx]; --v) {
      double cand = dp[v - scaled[idx]] + sizes[live[idx]];
      if (cand < dp[v] && cand <= capacity) {
        dp[v] = cand;
        take[idx][v] = 1;
      }
    }
  }
  long long best_v = 0;
  for (long long v = total; v >= 0; --v)
    if (dp[v] <= capacity) {
      best_v = v;
      break;
    }
  std::vector<int> out;
  long long v = best_v;
  for (size_t idx = live.size(); idx-- > 0;) {
    if (take[idx][v]) {
      out.push_back(live[idx]);
      v -= scaled[idx];
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline SapInstance make_knapsack_sap(const GapInstance& gap,
                                     const KnapsackMode& mode) {
  validate_gap(gap);
  SapInstance sap;
  sap.bins = gap.bins;
  sap.items = gap.items;
  sap.values = gap.values;
  sap.alpha = mode.kind == KnapsackMode::Kind::kExactSmall ? 1.0
                                                           : 1.0 - mode.eps;
  std::vector<std::vector<double>> sizes = gap.sizes;
  sap.feasible = [sizes](int bin, const std::vector<int>& set) {
    double total = 0.0;
    for (int j : set) total += sizes[bin][j];
    return total <= 1.0;
  };
  sap.approx_pack = [sizes, mode](int bin, const std::vector<double>& w) {
    return approx_pack_knapsack(w, sizes[bin], 1.0, mode);
  };
  return sap;
}

// The reduction's objective on any finite collection of (bin, set) pairs:
// every item contributes its best value among pairs whose set contains it.
inline double sap_objective(
    const std::vector<std::vector<double>>& values,
    const std::vector<std::pair<int, std::vector<int>>>& pairs) {
  if (values.empty()) return 0.0;
  const int n = static_cast<int>(values[0].size());
  std::vector<double> best(n, 0.0);
  std::vector<char> covered(n, 0);
  for (const auto& [bin, set] : pairs)
    for (int j : set) {
      if (!covered[j] || values[bin][j] > best[j]) best[j] = values[bin][j];
      covered[j] = 1;
    }
  double total = 0.0;
  for (int j = 0; j < n; ++j)
    if (covered[j]) total += best[j];
  return total;
}

// One multilinear-extension coordinate of the reduction: the pair (bin, set)
// present independently with probability x.
struct SapCoordinate {
  int bin = 0;
  std::vector<int> set;
  double x = 0.0;
};

// Exact multilinear extension over explicitly listed coordinates (test
// oracle; enumerates all 2^#coords outcomes, capped at 25).
inline double sap_extension_value(const std::vector<std::vector<double>>& values,
                                  const std::vector<SapCoordinate>& coords) {
  GSP_REQUIRE(coords.size() <= 25,
              "sap_extension_value: too many coordinates to enumerate");
  double total = 0.0;
  const size_t n = coords.size();
  for (uint64_t mask = 0; mask < (1ull << n); ++mask) {
    double prob = 1.0;
    std::vector<std::pair<int, std::vector<int>>> pairs;
    for (size_t c = 0; c < n; ++c) {
      if (mask >> c & 1ull) {
        prob *= coords[c].x;
        pairs.emplace_back(coords[c].bin, coords[c].set);
      } else {
        prob *= 1.0 - coords[c].x;
      }
    }
    if (prob > 0.0) total += prob * sap_objective(values, pairs);
  }
  return total;
}

// Current base of the bin matroid: one set per bin, plus the per-item bin
// permutations sorted by (value descending, bin ascending) and ownership
// indicators maintained in O(n) per reassignment. Optional integer owner
// masks per (item, value class) support the class-grouped weight formula.
class AssignmentState {
 public:
  explicit AssignmentState(const SapInstance& inst)
      : inst_(&inst),
        sets_(inst.bins),
        owns_(inst.bins, std::vector<uint8_t>(inst.items, 0)) {
    GSP_REQUIRE(inst.bins >= 1 && inst.items >= 1,
                "AssignmentState: empty instance");
    sigma_.resize(inst.items);
    rank_.assign(inst.items, std::vector<int>(inst.bins, 0));
    for (int j = 0; j < inst.items; ++j) {
      sigma_[j].resize(inst.bins);
      for (int i = 0; i < inst.bins; ++i) sigma_[j][i] = i;
      std::sort(sigma_[j].begin(), sigma_[j].end(), [&](int a, int b) {
        if (inst.values[a][j] != inst.values[b][j])
          return inst.values[a][j] > inst.values[b][j];
        return a < b;
      });
      for (int r = 0; r < inst.bins; ++r) rank_[j][sigma_[j][r]] = r;
    }
  }

  const SapInstance& instance() const { return *inst_; }
  int bins() const { return inst_->bins; }
  int items() const { return inst_->items; }
  const std::vector<int>& set_of(int bin) const { return sets_[bin]; }
  bool owns(int bin, int item) const { return owns_[bin][item] != 0; }
  int bin_at_rank(int item, int r) const { return sigma_[item][r]; }
  int rank_of(int item, int bin) const { return rank_[item][bin]; }

  void assign(int bin, std::vector<int> new_set) {
    std::sort(new_set.begin(), new_set.end());
    std::vector<uint8_t> next(inst_->items, 0);
    for (int j : new_set) {
      GSP_REQUIRE(j >= 0 && j < inst_->items, "AssignmentState: bad item id");
      next[j] = 1;
    }
    for (int j = 0; j < inst_->items; ++j) {
      if (next[j] == owns_[bin][j]) continue;
      owns_[bin][j] = next[j];
      if (classes_enabled_) {
        uint32_t& mask = owner_mask_[j][class_of_[j][bin]];
        mask ^= 1u << bin;
      }
    }
    sets_[bin] = std::move(new_set);
  }

  // Group each item's permutation into runs of exactly equal value and start
  // maintaining per-class integer owner masks.
  void enable_value_classes() {
    GSP_REQUIRE(inst_->bins <= 32,
                "AssignmentState: value classes need bins <= 32");
    classes_enabled_ = true;
    class_value_.assign(inst_->items, {});
    class_of_.assign(inst_->items, std::vector<int>(inst_->bins, 0));
    owner_mask_.assign(inst_->items, {});
    for (int j = 0; j < inst_->items; ++j) {
      for (int r = 0; r < inst_->bins; ++r) {
        int bin = sigma_[j][r];
        double v = inst_->values[bin][j];
        if (class_value_[j].empty() || class_value_[j].back() != v)
          class_value_[j].push_back(v);
        class_of_[j][bin] = static_cast<int>(class_value_[j].size()) - 1;
      }
      owner_mask_[j].assign(class_value_[j].size(), 0);
      for (int i = 0; i < inst_->bins; ++i)
        if (owns_[i][j]) owner_mask_[j][class_of_[j][i]] |= 1u << i;
    }
  }

  bool classes_enabled() const { return classes_enabled_; }
  int num_classes(int item) const {
    return static_cast<int>(class_value_[item].size());
  }
  double class_value(int item, int c) const { return class_value_[item][c]; }
  int class_of(int item, int bin) const { return class_of_[item][bin]; }
  uint32_t owner_mask(int item, int c) const { return owner_mask_[item][c]; }

 private:
  const SapInstance* inst_;
  std::vector<std::vector<int>> sets_;
  std::vector<std::vector<uint8_t>> owns_;
  std::vector<std::vector<int>> sigma_;
  std::vector<std::vector<int>> rank_;
  bool classes_enabled_ = false;
  std::vector<std::vector<double>> class_value_;
  std::vector<std::vector<int>> class_of_;
  std::vector<std::vector<uint32_t>> owner_mask_;
};

inline double sap_objective(const AssignmentState& st) {
  double total = 0.0;
  for (int j = 0; j < st.items(); ++j)
    for (int r = 0; r < st.bins(); ++r) {
      int bin = st.bin_at_rank(j, r);
      if (st.owns(bin, j)) {
        total += st.instance().values[bin][j];
        break;  // permutation is value-descending: first owner is the max
      }
    }
  return total;
}

// Closed-form swap weights for a candidate set in `bin` at time t:
//   w_j = v_ij (1-t)^{#better owners}
//         - sum over current owners at rank >= rank(i):
//             v (1-t)^{#owners ranked before them} * t,
// so that sum_{j in T} w_j equals the multilinear gain of adding (i,T) on
// top of tA, and the keep-current-set gradient is (1/(1-t)) sum_{j in S_i}.
inline std::vector<double> compute_swap_weights(const AssignmentState& st,
                                                int bin, double t) {
  GSP_REQUIRE(t > 0.0 && t < 1.0, "compute_swap_weights: t must be in (0,1)");
  const auto& v = st.instance().values;
  std::vector<double> w(st.items());
  for (int j = 0; j < st.items(); ++j) {
    const int l = st.rank_of(j, bin);
    int before = 0;
    for (int r = 0; r < l; ++r) before += st.owns(st.bin_at_rank(j, r), j);
    double wj = v[bin][j] * std::pow(1.0 - t, before);
    int cum = before;
    for (int r = l; r < st.bins(); ++r) {
      int b = st.bin_at_rank(j, r);
      if (!st.owns(b, j)) continue;
      wj -= v[b][j] * t * std::pow(1.0 - t, cum);
      ++cum;
    }
    w[j] = wj;
  }
  return w;
}

// Same weights via the value-class grouping: owners inside one class share a
// value, so their contributions collapse to one geometric sum read off the
// integer owner mask. O(#classes) touches per item, counter-reported.
inline std::vector<double> compute_swap_weights_classed(
    const AssignmentState& st, int bin, double t,
    long long* touches = nullptr) {
  GSP_REQUIRE(t > 0.0 && t < 1.0,
              "compute_swap_weights_classed: t must be in (0,1)");
  GSP_REQUIRE(st.classes_enabled(),
              "compute_swap_weights_classed: enable_value_classes first");
  const auto& v = st.instance().values;
  const double q = 1.0 - t;
  std::vector<double> w(st.items());
  for (int j = 0; j < st.items(); ++j) {
    const int ci = st.class_of(j, bin);
    double wj = 0.0;
    int pre = 0;  // owners ranked strictly before the class being processed
    for (int c = 0; c < st.num_classes(j); ++c) {
      if (touches) ++*touches;
      const uint32_t mask = st.owner_mask(j, c);
      const int total = __builtin_popcount(mask);
      if (c < ci) {
        pre += total;  // better value: blockers only
        continue;
      }
      if (c == ci) {
        // Within the class, permutation order is bin-ascending.
        const int below = __builtin_popcount(mask & ((1u << bin) - 1u));
        const int at_or_after = total - below;
        wj += v[bin][j] * std::pow(q, pre + below);
        wj -= st.class_value(j, c) * std::pow(q, pre + below) *
              (1.0 - std::pow(q, at_or_after));
      } else {
        wj -= st.class_value(j, c) * std::pow(q, pre) *
              (1.0 - std::pow(q, total));
      }
      pre += total;
    }
    w[j] = wj;
  }
  return w;
}

struct SapSwapDecision {
  int bin = 0;
  std::vector<int> new_set;
  double pack_weight = 0.0;  // true (unclamped) weight of the packed set
  double keep_weight = 0.0;  // (1/(1-t)) * weight of the current set
  bool swapped = false;
};

struct SapSwapOptions {
  bool use_value_classes = false;
  long long* weight_touches = nullptr;
};

// One swap proposal: draw a bin uniformly, pack against the non-negative
// part of the weights, and keep the current set unless the packed set's true
// weight beats the keep-set gradient (1/(1-t)) sum_{j in S_i} w_j. Dropping
// negative-weight items before packing is safe because feasible sets are
// down-closed. t < 1 strictly, so 1 - t never underflows in double.
inline SapSwapDecision sap_swap(const SapInstance& inst,
                                const AssignmentState& st, double t, Rng& rng,
                                const SapSwapOptions& opts = {}) {
  GSP_REQUIRE(t > 0.0 && t < 1.0, "sap_swap: t must be in (0,1)");
  SapSwapDecision d;
  d.bin = rng.uniform_int(inst.bins);
  std::vector<double> w =
      opts.use_value_classes
          ? compute_swap_weights_classed(st, d.bin, t, opts.weight_touches)
          : compute_swap_weights(st, d.bin, t);
  std::vector<double> clamped(w.size());
  for (size_t j = 0; j < w.size(); ++j) clamped[j] = std::max(0.0, w[j]);

  std::vector<int> packed = inst.approx_pack(d.bin, clamped);
  GSP_ASSERT(inst.feasible(d.bin, packed),
             "sap_swap: packing returned an infeasible set");
  for (int j : packed) d.pack_weight += w[j];
  for (int j : st.set_of(d.bin)) d.keep_weight += w[j];
  d.keep_weight /= 1.0 - t;

  d.swapped = d.pack_weight > d.keep_weight;
  d.new_set = d.swapped ? std::move(packed) : st.set_of(d.bin);
  return d;
}

// Round every value to the nearest power of (1+eps) in log space, zeroing
// values below (eps / (n*m)) * max. Survivors change by at most a factor
// sqrt(1+eps) either way, and at most O(log(nm/eps)/eps) distinct values
// remain.
inline GapInstance round_values(const GapInstance& gap, double eps) {
  GSP_REQUIRE(eps > 0.0, "round_values: eps must be positive");
  validate_gap(gap);
  GapInstance out = gap;
  double vmax = 0.0;
  for (const auto& row : gap.values)
    for (double v : row) vmax = std::max(vmax, v);
  if (vmax == 0.0) return out;
  const double cutoff = eps / (static_cast<double>(gap.items) * gap.bins) *
                        vmax;
  for (auto& row : out.values)
    for (double& v : row) {
      if (v < cutoff) {
        v = 0.0;
        continue;
      }
      const long long expo =
          std::llround(std::log(v) / std::log1p(eps));
      v = std::pow(1.0 + eps, static_cast<double>(expo));
    }
  return out;
}

struct GapOptimum {
  std::vector<std::vector<int>> assignment;
  double value = 0.0;
  long long assignments_enumerated = 0;
};

// Exhaustive optimum over all (m+1)^n item placements (test oracle).
inline GapOptimum brute_force_gap_optimum(const GapInstance& gap) {
  validate_gap(gap);
  const double count =
      std::pow(static_cast<double>(gap.bins) + 1.0, gap.items);
  GSP_REQUIRE(count <= 2e6, "brute_force_gap_optimum: too many assignments");

  GapOptimum best;
  best.assignment.assign(gap.bins, {});
  std::vector<int> place(gap.items, 0);  // 0 = unassigned, b+1 = bin b
  while (true) {
    ++best.assignments_enumerated;
    std::vector<double> load(gap.bins, 0.0);
    double value = 0.0;
    bool ok = true;
    for (int j = 0; j < gap.items && ok; ++j) {
      if (place[j] == 0) continue;
      int b = place[j] - 1;
      load[b] += gap.sizes[b][j];
      value += gap.values[b][j];
      ok = load[b] <= 1.0;
    }
    if (ok && value > best.value) {
      best.value = value;
      for (auto& s : best.assignment) s.clear();
      for (int j = 0; j < gap.items; ++j)
        if (place[j] > 0) best.assignment[place[j] - 1].push_back(j);
    }
    int j = 0;
    while (j < gap.items && place[j] == gap.bins) place[j++] = 0;
    if (j == gap.items) break;
    ++place[j];
  }
  return best;
}

struct SapSolveOptions {
  bool use_value_classes = false;
};

struct SapReport {
  std::vector<std::vector<int>> assignment;  // disjoint, bin-feasible
  double value = 0.0;
  long long swap_events = 0;
  long long weight_touches = 0;
  uint64_t seed = 0;
  double wall_time = 0.0;
};

// Poisson swap process over the bin partition matroid (rank m): start from
// all-empty sets, run the clock from eps to 1, apply sap_swap at each event,
// then extract the disjoint assignment by giving each item to its best
// owning bin. The extracted value equals the objective of the final base.
inline SapReport solve_sap(const SapInstance& inst, double epsilon,
                           uint64_t seed, const SapSolveOptions& opts = {}) {
  GSP_REQUIRE(epsilon > 0.0 && epsilon < 1.0,
              "solve_sap: epsilon must be in (0,1)");
  GSP_REQUIRE(inst.bins >= 1 && inst.items >= 1, "solve_sap: empty instance");
  const auto start = std::chrono::steady_clock::now();

  AssignmentState st(inst);
  if (opts.use_value_classes) st.enable_value_classes();
  for (int i = 0; i < inst.bins; ++i)
    GSP_REQUIRE(inst.feasible(i, {}),
                "solve_sap: empty set must be feasible (down-closed family)");

  SapReport rep;
  rep.seed = seed;
  Rng clock_rng(seed, kClockStream);
  Rng swap_rng(seed, kSwapStream);
  PoissonClock clock{epsilon, inst.bins, epsilon};
  SapSwapOptions swap_opts;
  swap_opts.use_value_classes = opts.use_value_classes;
  swap_opts.weight_touches = &rep.weight_touches;
  while (true) {
    double r = sample_next_event(clock, clock_rng);
    if (r >= 1.0) break;
    clock.t = r;
    SapSwapDecision d = sap_swap(inst, st, clock.t, swap_rng, swap_opts);
    st.assign(d.bin, d.new_set);
    ++rep.swap_events;
  }

  rep.assignment.assign(inst.bins, {});
  for (int j = 0; j < st.items(); ++j)
    for (int r = 0; r < st.bins(); ++r) {
      int bin = st.bin_at_rank(j, r);
      if (st.owns(bin, j)) {
        rep.assignment[bin].push_back(j);  // best owner: value desc, bin asc
        break;
      }
    }
  for (int i = 0; i < inst.bins; ++i)
    GSP_ASSERT(inst.feasible(i, rep.assignment[i]),
               "solve_sap: extracted set infeasible despite down-closedness");
  rep.value = sap_objective(st);
  rep.wall_time = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
  return rep;
}

}  // namespace gsp

#endif  // GSP_ASSIGNMENT_HPP_
